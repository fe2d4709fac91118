#pragma once

#include "kkoop/errors.hpp"
#include "kkoop/types.hpp"
#include "kkoop/format.hpp"
#include "kkoop/kernels.hpp"
#include "kkoop/geometry.hpp"
#include "kkoop/linsys.hpp"
#include "kkoop/koopman.hpp"
#include "kkoop/dynamics.hpp"
#include "kkoop/mocap.hpp"
#include "kkoop/studies.hpp"
#include "kkoop/io.hpp"
#include "kkoop/experiment_defaults.hpp"
