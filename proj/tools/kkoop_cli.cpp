// kkoop: experiment driver. Every subcommand writes plain CSV into --out,
// each file headed by "# key=value" lines holding the full configuration.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kkoop/kkoop.hpp"

namespace fs = std::filesystem;
using namespace kkoop;

namespace {

enum ExitCode { Ok = 0, BadConfig = 2, Numerical = 3, IoFailure = 4 };

struct Global {
    std::string out = ".";
    unsigned threads = 1;
    bool manifest = false;
};

struct KernelOptions {
    std::string family = std::string(to_string(KernelSpec{}.family));
    double beta = KernelSpec{}.beta;
    double support_scale = KernelSpec{}.support_scale;
    std::string distance_convention = std::string(to_string(KernelSpec{}.distance_convention));

    void attach(CLI::App* app) {
        app->add_option("--family", family,
                        "MaternSobolev32, WendlandC2, WendlandC4 or WendlandC6")
            ->capture_default_str();
        app->add_option("--beta", beta, "Matern decay length")->capture_default_str();
        app->add_option("--support_scale", support_scale, "Wendland support radius")
            ->capture_default_str();
        app->add_option("--distance_convention", distance_convention,
                        "PlainDistance or SquaredDistanceAsWritten")
            ->capture_default_str();
    }

    [[nodiscard]] KernelSpec spec() const {
        return kernel_spec_from_key_values({{"family", family},
                                            {"beta", format_double(beta)},
                                            {"support_scale", format_double(support_scale)},
                                            {"distance_convention", distance_convention}});
    }
};

JitterPolicy parse_jitter(const std::string& s) {
    if (s == "none") return JitterPolicy::none();
    if (s == "auto") return JitterPolicy::automatic();
    try {
        return JitterPolicy::fixed(parse_double(s, "jitter"));
    } catch (const ParseError&) {
        throw InvalidArgument("jitter must be 'none', 'auto' or a number, got '" + s + "'");
    }
}

io::Metadata with(io::Metadata base, const io::Metadata& more) {
    base.insert(base.end(), more.begin(), more.end());
    return base;
}

io::Metadata pendulum_meta(const PendulumConfig& c) {
    return {{"integrator", "stormer-verlet"},
            {"x1_0", format_double(c.x1_0)},
            {"x2_0", format_double(c.x2_0)},
            {"h", format_double(c.h)},
            {"steps", std::to_string(c.steps)}};
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ";" : "") + format_double(v[i]);
    }
    return s;
}

class Run {
public:
    explicit Run(const Global& g) : g_(g) {}

    fs::path prepare() const {
        const fs::path dir(g_.out);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec || !fs::is_directory(dir)) {
            throw IoError("cannot create output directory '" + dir.string() + "'");
        }
        return dir;
    }

    void emit(const std::string& name, const std::string& contents) {
        io::write_file_atomic(prepare() / name, contents);
        files_.push_back(name);
    }

    void note(const std::string& key, const std::string& value) { summary_[key] = value; }

    void finish(const std::string& command, const io::Metadata& config) {
        for (const auto& [k, v] : summary_) {
            std::cout << k << " = " << v << '\n';
        }
        if (!g_.manifest) {
            return;
        }
        nlohmann::ordered_json m;
        m["command"] = command;
        for (const auto& [k, v] : config) m["config"][k] = v;
        m["summary"] = summary_;
        m["files"] = files_;
        io::write_file_atomic(prepare() / "manifest.json", m.dump(2) + "\n");
    }

private:
    const Global& g_;
    std::vector<std::string> files_;
    std::map<std::string, std::string> summary_;
};

TrajectoryDataset load_or_simulate(const std::string& path, io::Metadata& meta) {
    if (path.empty()) {
        const PendulumConfig c;
        meta = with(meta, pendulum_meta(c));
        return simulate(c);
    }
    meta.emplace_back("trajectory", path);
    return io::trajectory_from_csv(io::read_csv(path));
}

std::string grid_csv(const Grid2D& grid, const Eigen::MatrixXd& values,
                     const std::vector<std::string>& names, const io::Metadata& meta) {
    io::CsvWriter w(meta);
    w.header(names);
    const Eigen::MatrixXd q = grid.points();
    for (Index i = 0; i < q.rows(); ++i) {
        std::vector<double> row{q(i, 0), q(i, 1)};
        for (Index j = 0; j < values.cols(); ++j) row.push_back(values(i, j));
        w.row(row);
    }
    return w.str();
}

// --- simulate --------------------------------------------------------------

struct SimulateOptions {
    PendulumConfig c;
};

void cmd_simulate(const Global& g, const SimulateOptions& o) {
    const auto data = simulate(o.c);
    Run run(g);
    const auto meta = pendulum_meta(o.c);
    run.emit("trajectory.csv", io::trajectory_csv(data, meta));
    run.note("rows", std::to_string(data.size()));
    run.note("energy_drift",
             format_double(std::abs(pendulum_energy({data.next_states(data.size() - 1, 0),
                                                      data.next_states(data.size() - 1, 1)}) -
                                    pendulum_energy({o.c.x1_0, o.c.x2_0}))));
    run.finish("simulate", meta);
}

// --- fit -------------------------------------------------------------------

struct FitOptions {
    std::string trajectory;
    KernelOptions kernel;
    double eta = defaults::pendulum_eta;
    int grid = defaults::grid_size;
    std::string jitter = "none";
};

void cmd_fit(const Global& g, const FitOptions& o) {
    const KernelSpec spec = o.kernel.spec();
    const JitterPolicy jitter = parse_jitter(o.jitter);
    if (o.grid < 2) throw InvalidArgument("grid must be >= 2");
    const auto data = io::trajectory_from_csv(io::read_csv(o.trajectory));
    const PointSet centers = subselect_centers(data, o.eta);
    const auto est = fit_pullback(data, centers, spec, jitter);

    const double fill = fill_distance(centers, data.state_points());
    const double sep = centers.size() >= 2 ? separation(centers) : 0.0;
    io::Metadata meta = with(io::kernel_metadata(spec), {{"trajectory", o.trajectory},
                                                        {"eta", format_double(o.eta)},
                                                        {"jitter", o.jitter},
                                                        {"grid", std::to_string(o.grid)}});
    const io::Metadata diag{{"centers", std::to_string(centers.size())},
                            {"fill", format_double(fill)},
                            {"separation", format_double(sep)},
                            {"condition_number", format_double(est.diagnostics.condition_number)}};

    const Grid2D grid = padded_grid(data.next_states, o.grid, o.grid);
    const Eigen::MatrixXd values = predict_many(est, grid.points());
    Run run(g);
    run.emit("estimate.csv", io::estimate_csv(est, {{"eta", format_double(o.eta)},
                                                    {"trajectory", o.trajectory}}));
    run.emit("centers.csv", io::point_set_csv(centers, meta));
    run.emit("grid.csv", grid_csv(grid, values, {"x1", "x2", "value"}, with(meta, diag)));
    for (const auto& [k, v] : diag) run.note(k, v);
    run.note("jitter_used", format_double(est.diagnostics.jitter_used));
    run.finish("fit", meta);
}

// --- convergence -----------------------------------------------------------

struct ConvergenceOptions {
    std::string trajectory;
    KernelOptions kernel;
    std::vector<double> targets = defaults::convergence_targets();
};

void cmd_convergence(const Global& g, const ConvergenceOptions& o) {
    const KernelSpec spec = o.kernel.spec();
    io::Metadata meta = with(io::kernel_metadata(spec), {{"targets", join(o.targets)}});
    const auto data = load_or_simulate(o.trajectory, meta);
    const auto res = convergence_study(data, spec, o.targets);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';

    io::CsvWriter w(with(meta, {{"slope", format_double(res.slope)}}));
    w.header({"target", "centers", "fill", "sup_error", "cond"});
    for (const auto& r : res.rows) {
        w.row({r.target, static_cast<double>(r.centers), r.fill, r.sup_error, r.cond});
    }
    Run run(g);
    run.emit("convergence.csv", w.str());
    run.note("rows", std::to_string(res.rows.size()));
    run.note("slope", format_double(res.slope));
    run.finish("convergence", meta);
}

// --- conditioning ----------------------------------------------------------

// "Family" or "Family:param", the parameter being beta for the Matern
// kernel and the support radius for the Wendland kernels.
KernelSpec parse_kernel_item(const std::string& item) {
    KernelSpec k;
    const auto colon = item.find(':');
    k.family = parse_kernel_family(trim(item.substr(0, colon)));
    if (colon != std::string::npos) {
        double v = 0.0;
        try {
            v = parse_double(item.substr(colon + 1), "kernel parameter");
        } catch (const ParseError& e) {
            throw InvalidArgument(e.what());
        }
        (k.compactly_supported() ? k.support_scale : k.beta) = v;
    }
    k.validate();
    return k;
}

struct ConditioningOptions {
    std::string trajectory;
    std::vector<std::string> kernels{"WendlandC2:1", "WendlandC4:1", "WendlandC6:1",
                                     "MaternSobolev32:0.2", "MaternSobolev32:0.5",
                                     "MaternSobolev32:1", "MaternSobolev32:5"};
    std::vector<double> spacings = defaults::conditioning_spacings();
};

void cmd_conditioning(const Global& g, const ConditioningOptions& o) {
    std::vector<KernelSpec> kernels;
    std::string names;
    for (const auto& item : o.kernels) {
        kernels.push_back(parse_kernel_item(item));
        names += (names.empty() ? "" : ";") + item;
    }
    io::Metadata meta{{"kernels", names}, {"spacings", join(o.spacings)}};
    const auto data = load_or_simulate(o.trajectory, meta);
    const auto rows = conditioning_study(data.state_points(), kernels, o.spacings, g.threads);

    io::CsvWriter w(meta);
    w.header({"kernel", "family", "beta", "support_scale", "spacing", "centers", "separation",
              "cond", "lambda_min"});
    for (const auto& r : rows) {
        w.row_strings({std::to_string(r.kernel_index), std::string(to_string(r.kernel.family)),
                       format_double(r.kernel.beta), format_double(r.kernel.support_scale),
                       format_double(r.spacing), std::to_string(r.centers),
                       format_double(r.separation), format_double(r.cond),
                       format_double(r.lambda_min)});
    }
    Run run(g);
    run.emit("conditioning.csv", w.str());
    run.note("rows", std::to_string(rows.size()));
    run.finish("conditioning", meta);
}

// --- mineig ----------------------------------------------------------------

struct MinEigOptions {
    std::string trajectory;
    KernelOptions kernel;
    std::vector<double> base_etas = defaults::mineig_base_etas();
    std::vector<double> deltas = defaults::mineig_deltas();
};

void cmd_mineig(const Global& g, const MinEigOptions& o) {
    const KernelSpec spec = o.kernel.spec();
    io::Metadata meta = with(io::kernel_metadata(spec),
                             {{"base_etas", join(o.base_etas)}, {"deltas", join(o.deltas)}});
    const auto data = load_or_simulate(o.trajectory, meta);
    const auto rows = mineig_study(data.state_points(), spec, o.base_etas, o.deltas, g.threads);

    io::CsvWriter w(meta);
    w.header({"base_eta", "centers", "base_fill", "fill", "base_lambda_min", "delta",
              "lambda_min"});
    for (const auto& r : rows) {
        w.row({r.base_eta, static_cast<double>(r.centers), r.base_fill, r.fill,
               r.base_lambda_min, r.delta, r.lambda_min});
    }
    Run run(g);
    run.emit("mineig.csv", w.str());
    run.note("rows", std::to_string(rows.size()));
    run.finish("mineig", meta);
}

// --- mocap -----------------------------------------------------------------

struct MocapOptions {
    std::string markers;
    KernelOptions kernel;
    double eta = defaults::mocap_eta;
    std::string forward = "x";
    std::string up = "z";
    int grid = defaults::grid_size;
    std::string jitter = "auto";

    MocapOptions() { kernel.beta = defaults::mocap_beta; }
};

void cmd_mocap(const Global& g, const MocapOptions& o) {
    const KernelSpec spec = o.kernel.spec();
    const JitterPolicy jitter = parse_jitter(o.jitter);
    if (o.grid < 2) throw InvalidArgument("grid must be >= 2");
    const SagittalAxes axes{parse_axis(o.forward), parse_axis(o.up)};
    const auto load = io::markers_from_csv(io::read_csv(o.markers));
    if (load.skipped > 0) {
        std::cerr << "skipped " << load.skipped << " frame(s) with missing markers\n";
    }
    std::vector<JointAngleSample> samples;
    samples.reserve(load.frames.size());
    for (const auto& f : load.frames) {
        samples.push_back(joint_angles(project_sagittal(f, axes)));
    }
    const auto fit = fit_kinematics(samples, o.eta, spec, jitter);

    const io::Metadata meta =
        with(io::kernel_metadata(spec), {{"markers", o.markers},
                                         {"eta", format_double(o.eta)},
                                         {"forward", o.forward},
                                         {"up", o.up},
                                         {"jitter", o.jitter},
                                         {"grid", std::to_string(o.grid)}});
    const io::Metadata diag{{"frames", std::to_string(load.frames.size())},
                            {"skipped", std::to_string(load.skipped)},
                            {"pairs", std::to_string(fit.dataset.size())},
                            {"centers", std::to_string(fit.centers.size())},
                            {"fill", format_double(fit.fill)},
                            {"separation", format_double(fit.separation)},
                            {"condition_number", format_double(fit.cond)},
                            {"regularized", fit.regularized ? "true" : "false"}};

    const Grid2D grid = padded_grid(fit.dataset.next_states, o.grid, o.grid);
    const Eigen::MatrixXd q = grid.points();
    Eigen::MatrixXd values(q.rows(), 2);
    values.col(0) = predict_many(fit.g1, q).col(0);
    values.col(1) = predict_many(fit.g2, q).col(0);

    Run run(g);
    run.emit("angles.csv", io::angles_csv(samples, meta));
    run.emit("surface_grid.csv", grid_csv(grid, values, {"theta1", "theta2", "G1_hat", "G2_hat"},
                                          with(meta, diag)));
    run.emit("estimate_G1.csv", io::estimate_csv(fit.g1, {{"output", "y1"}}));
    run.emit("estimate_G2.csv", io::estimate_csv(fit.g2, {{"output", "y2"}}));
    for (const auto& [k, v] : diag) run.note(k, v);
    run.finish("mocap", meta);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel pullback estimates of Koopman operators: experiment driver"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI file; one [section] per subcommand");
    Global g;
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads for sweeps")
        ->capture_default_str()
        ->check(CLI::Range(1u, 256u));
    app.add_flag("--manifest", g.manifest, "Also write manifest.json");

    SimulateOptions sim;
    auto* s = app.add_subcommand("simulate", "Integrate the pendulum and write trajectory.csv");
    s->set_help_flag("--help", "Print this help message and exit");
    s->add_option("--x1_0", sim.c.x1_0, "Initial momentum")->capture_default_str();
    s->add_option("--x2_0", sim.c.x2_0, "Initial angle")->capture_default_str();
    s->add_option("--h", sim.c.h, "Step size")->capture_default_str();
    s->add_option("--steps", sim.c.steps, "Number of steps")->capture_default_str();

    FitOptions fit;
    auto* f = app.add_subcommand("fit", "Fit a pullback estimate and evaluate it on a grid");
    f->add_option("--trajectory", fit.trajectory, "Trajectory CSV")->required();
    fit.kernel.attach(f);
    f->add_option("--eta", fit.eta, "Center subselection gate")->capture_default_str();
    f->add_option("--grid", fit.grid, "Grid points per axis")->capture_default_str();
    f->add_option("--jitter", fit.jitter, "none, auto or a fixed ridge value")
        ->capture_default_str();

    ConvergenceOptions conv;
    auto* c = app.add_subcommand("convergence", "Sup error against fill distance");
    c->add_option("--trajectory", conv.trajectory, "Trajectory CSV (default orbit if omitted)");
    conv.kernel.attach(c);
    c->add_option("--targets", conv.targets, "Decreasing fill targets")
        ->capture_default_str()
        ->delimiter(',');

    ConditioningOptions cond;
    auto* k = app.add_subcommand("conditioning", "Condition number against center spacing");
    k->add_option("--trajectory", cond.trajectory, "Trajectory CSV (default orbit if omitted)");
    k->add_option("--kernels", cond.kernels, "Family or Family:param entries")
        ->capture_default_str()
        ->delimiter(',');
    k->add_option("--spacings", cond.spacings, "Center spacings")
        ->capture_default_str()
        ->delimiter(',');

    MinEigOptions me;
    auto* m = app.add_subcommand("mineig", "Minimum eigenvalue against one shrinking pair");
    m->add_option("--trajectory", me.trajectory, "Trajectory CSV (default orbit if omitted)");
    me.kernel.attach(m);
    m->add_option("--base_etas", me.base_etas, "Gates for the base center sets")
        ->capture_default_str()
        ->delimiter(',');
    m->add_option("--deltas", me.deltas, "Extra-center distances")
        ->capture_default_str()
        ->delimiter(',');

    MocapOptions mo;
    auto* p = app.add_subcommand("mocap", "Joint angles and kinematic surfaces from markers");
    p->add_option("--markers", mo.markers, "Marker CSV")->required();
    mo.kernel.attach(p);
    p->add_option("--eta", mo.eta, "Center subselection gate")->capture_default_str();
    p->add_option("--forward", mo.forward, "Forward axis (x, y or z)")->capture_default_str();
    p->add_option("--up", mo.up, "Vertical axis (x, y or z)")->capture_default_str();
    p->add_option("--grid", mo.grid, "Grid points per axis")->capture_default_str();
    p->add_option("--jitter", mo.jitter, "none, auto or a fixed ridge value")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? Ok : BadConfig;
    }

    try {
        if (s->parsed()) cmd_simulate(g, sim);
        if (f->parsed()) cmd_fit(g, fit);
        if (c->parsed()) cmd_convergence(g, conv);
        if (k->parsed()) cmd_conditioning(g, cond);
        if (m->parsed()) cmd_mineig(g, me);
        if (p->parsed()) cmd_mocap(g, mo);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return BadConfig;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return IoFailure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Numerical;
    }
    return Ok;
}
