#pragma once

#include <cmath>
#include <map>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "kkoop/errors.hpp"
#include "kkoop/format.hpp"
#include "kkoop/types.hpp"

namespace kkoop {

enum class KernelFamily { MaternSobolev32, WendlandC2, WendlandC4, WendlandC6 };

// Matérn argument: the standard plain distance, or the squared distance
// exactly as the formula is printed in the source experiments.
enum class DistanceConvention { PlainDistance, SquaredDistanceAsWritten };

inline std::string_view to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::MaternSobolev32: return "MaternSobolev32";
        case KernelFamily::WendlandC2: return "WendlandC2";
        case KernelFamily::WendlandC4: return "WendlandC4";
        case KernelFamily::WendlandC6: return "WendlandC6";
    }
    return "unknown";
}

inline std::string_view to_string(DistanceConvention c) {
    return c == DistanceConvention::PlainDistance ? "PlainDistance" : "SquaredDistanceAsWritten";
}

inline KernelFamily parse_kernel_family(std::string_view name) {
    for (auto f : {KernelFamily::MaternSobolev32, KernelFamily::WendlandC2,
                   KernelFamily::WendlandC4, KernelFamily::WendlandC6}) {
        if (name == to_string(f)) {
            return f;
        }
    }
    throw InvalidArgument("unknown kernel family '" + std::string(name) + "'");
}

inline DistanceConvention parse_distance_convention(std::string_view name) {
    if (name == "PlainDistance") return DistanceConvention::PlainDistance;
    if (name == "SquaredDistanceAsWritten") return DistanceConvention::SquaredDistanceAsWritten;
    throw InvalidArgument("unknown distance convention '" + std::string(name) + "'");
}

struct KernelSpec {
    KernelFamily family = KernelFamily::MaternSobolev32;
    double beta = 1.0;           // Matérn decay length
    double support_scale = 1.0;  // Wendland support radius
    DistanceConvention distance_convention = DistanceConvention::PlainDistance;

    void validate() const {
        if (!(beta > 0.0) || !std::isfinite(beta)) {
            throw InvalidArgument("KernelSpec: beta must be positive, got " + format_double(beta));
        }
        if (!(support_scale > 0.0) || !std::isfinite(support_scale)) {
            throw InvalidArgument("KernelSpec: support_scale must be positive, got " +
                                  format_double(support_scale));
        }
    }

    [[nodiscard]] bool compactly_supported() const {
        return family != KernelFamily::MaternSobolev32;
    }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

using KeyValues = std::map<std::string, std::string, std::less<>>;

/// Flat key-value form: family, beta, support_scale, distance_convention.
inline KeyValues to_key_values(const KernelSpec& spec) {
    return {{"family", std::string(to_string(spec.family))},
            {"beta", format_double(spec.beta)},
            {"support_scale", format_double(spec.support_scale)},
            {"distance_convention", std::string(to_string(spec.distance_convention))}};
}

/// Missing keys keep their defaults; unknown keys are ignored.
inline KernelSpec kernel_spec_from_key_values(const KeyValues& kv) {
    KernelSpec spec;
    if (auto it = kv.find("family"); it != kv.end()) {
        spec.family = parse_kernel_family(trim(it->second));
    }
    try {
        if (auto it = kv.find("beta"); it != kv.end()) {
            spec.beta = parse_double(it->second, "beta");
        }
        if (auto it = kv.find("support_scale"); it != kv.end()) {
            spec.support_scale = parse_double(it->second, "support_scale");
        }
    } catch (const ParseError& e) {
        throw InvalidArgument(e.what());
    }
    if (auto it = kv.find("distance_convention"); it != kv.end()) {
        spec.distance_convention = parse_distance_convention(trim(it->second));
    }
    spec.validate();
    return spec;
}

namespace detail {

inline double wendland_profile(KernelFamily family, double d) {
    if (d >= 1.0) {
        return 0.0;
    }
    const double t = 1.0 - d;
    const double t2 = t * t;
    const double t4 = t2 * t2;
    switch (family) {
        case KernelFamily::WendlandC2:
            return t4 * (4.0 * d + 1.0);
        case KernelFamily::WendlandC4:
            // Raw polynomial equals 3 at the origin; normalized to K(x,x) = 1.
            return t4 * t2 * (35.0 * d * d + 18.0 * d + 3.0) / 3.0;
        case KernelFamily::WendlandC6:
            return t4 * t4 * (((32.0 * d + 25.0) * d + 8.0) * d + 1.0);
        case KernelFamily::MaternSobolev32:
            break;
    }
    return 0.0;
}

inline double kernel_of_distance(const KernelSpec& spec, double dist) {
    if (spec.family == KernelFamily::MaternSobolev32) {
        const double r = spec.distance_convention == DistanceConvention::PlainDistance
                             ? dist
                             : dist * dist;
        const double a = std::sqrt(3.0) * r / spec.beta;
        return (1.0 + a) * std::exp(-a);
    }
    return wendland_profile(spec.family, dist / spec.support_scale);
}

template <typename DerivedA, typename DerivedB>
double distance(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& y) {
    double s = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        const double d = x(i) - y(i);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace detail

template <typename DerivedA, typename DerivedB>
double eval_kernel(const KernelSpec& spec, const Eigen::MatrixBase<DerivedA>& x,
                   const Eigen::MatrixBase<DerivedB>& y) {
    if (x.size() != y.size()) {
        throw InvalidArgument("eval_kernel: dimension mismatch (" + std::to_string(x.size()) +
                              " vs " + std::to_string(y.size()) + ")");
    }
    return detail::kernel_of_distance(spec, detail::distance(x, y));
}

/// K(A, B) with A and B given as row-per-point matrices. Passing the same
/// matrix object twice assembles one triangle and mirrors it.
inline Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& a,
                                     const Eigen::MatrixXd& b) {
    if (a.rows() == 0 || b.rows() == 0) {
        throw InvalidArgument("kernel_matrix: empty point set");
    }
    if (a.cols() != b.cols()) {
        throw InvalidArgument("kernel_matrix: dimension mismatch (" + std::to_string(a.cols()) +
                              " vs " + std::to_string(b.cols()) + ")");
    }
    Eigen::MatrixXd k(a.rows(), b.rows());
    if (&a == &b) {
        for (Index j = 0; j < a.rows(); ++j) {
            k(j, j) = detail::kernel_of_distance(spec, 0.0);
            for (Index i = j + 1; i < a.rows(); ++i) {
                const double v = detail::kernel_of_distance(spec, detail::distance(a.row(i), a.row(j)));
                k(i, j) = v;
                k(j, i) = v;
            }
        }
        return k;
    }
    for (Index j = 0; j < b.rows(); ++j) {
        for (Index i = 0; i < a.rows(); ++i) {
            k(i, j) = detail::kernel_of_distance(spec, detail::distance(a.row(i), b.row(j)));
        }
    }
    return k;
}

inline Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const PointSet& a, const PointSet& b) {
    if (&a == &b) {
        return kernel_matrix(spec, a.points, a.points);
    }
    return kernel_matrix(spec, a.points, b.points);
}

/// Kernel sections at `centers` evaluated at x: [K(c_1, x), ..., K(c_M, x)]^T.
template <typename Derived>
Eigen::VectorXd kernel_sections(const KernelSpec& spec, const Eigen::MatrixXd& centers,
                                const Eigen::MatrixBase<Derived>& x) {
    if (x.size() != centers.cols()) {
        throw InvalidArgument("kernel_sections: query dimension " + std::to_string(x.size()) +
                              " does not match center dimension " +
                              std::to_string(centers.cols()));
    }
    Eigen::VectorXd psi(centers.rows());
    for (Index i = 0; i < centers.rows(); ++i) {
        psi(i) = detail::kernel_of_distance(spec, detail::distance(centers.row(i), x));
    }
    return psi;
}

}  // namespace kkoop
