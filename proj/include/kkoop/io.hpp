#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kkoop/errors.hpp"
#include "kkoop/format.hpp"
#include "kkoop/kernels.hpp"
#include "kkoop/koopman.hpp"
#include "kkoop/mocap.hpp"
#include "kkoop/types.hpp"

namespace kkoop::io {

// Comment header lines are written as "# key=value". They are part of the
// file contents, so keep them free of timestamps or anything
// run-dependent.
using Metadata = std::vector<std::pair<std::string, std::string>>;

struct CsvTable {
    Metadata meta;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based source line of each row
    std::string source = "<memory>";

    [[nodiscard]] std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                return i;
            }
        }
        throw ParseError(source + ": missing column '" + std::string(name) + "'");
    }

    [[nodiscard]] const std::string* meta_value(std::string_view key) const {
        for (const auto& [k, v] : meta) {
            if (k == key) {
                return &v;
            }
        }
        return nullptr;
    }

    [[nodiscard]] std::string where(std::size_t row) const {
        return source + ":" + std::to_string(line_numbers.at(row));
    }

    [[nodiscard]] double number(std::size_t row, std::size_t col) const {
        try {
            return parse_double(rows.at(row).at(col), header.at(col));
        } catch (const ParseError& e) {
            throw ParseError(where(row) + ": " + e.what());
        }
    }
};

inline CsvTable parse_csv(std::istream& in, std::string source) {
    CsvTable t;
    t.source = std::move(source);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = trim(line);
        if (view.empty()) {
            continue;
        }
        if (view.front() == '#') {
            const auto body = trim(view.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string_view::npos) {
                t.meta.emplace_back(std::string(trim(body.substr(0, eq))),
                                    std::string(trim(body.substr(eq + 1))));
            }
            continue;
        }
        auto fields = split(view, ',');
        if (t.header.empty()) {
            for (auto f : fields) t.header.emplace_back(f);
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw ParseError(t.source + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(t.header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        std::vector<std::string> row;
        row.reserve(fields.size());
        for (auto f : fields) row.emplace_back(f);
        t.rows.push_back(std::move(row));
        t.line_numbers.push_back(lineno);
    }
    if (t.header.empty()) {
        throw ParseError(t.source + ": no header line");
    }
    return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    return parse_csv(in, path.string());
}

/// Writes to a sibling temporary file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        out << contents;
        out.flush();
        if (!out) {
            throw IoError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "'");
    }
}

class CsvWriter {
public:
    explicit CsvWriter(const Metadata& meta = {}) {
        for (const auto& [k, v] : meta) {
            out_ << "# " << k << '=' << v << '\n';
        }
    }

    CsvWriter& header(const std::vector<std::string>& names) {
        row_strings(names);
        return *this;
    }

    CsvWriter& row_strings(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
        return *this;
    }

    CsvWriter& row(std::initializer_list<double> values) {
        return row(std::vector<double>(values));
    }

    CsvWriter& row(const std::vector<double>& values) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ',';
            out_ << format_double(v);
            first = false;
        }
        out_ << '\n';
        return *this;
    }

    [[nodiscard]] std::string str() const { return out_.str(); }

    void save(const std::filesystem::path& path) const { write_file_atomic(path, str()); }

private:
    std::ostringstream out_;
};

inline Metadata kernel_metadata(const KernelSpec& spec) {
    Metadata m;
    for (const auto& [k, v] : to_key_values(spec)) {
        m.emplace_back(k, v);
    }
    return m;
}

inline KernelSpec kernel_from_metadata(const CsvTable& t) {
    KeyValues kv;
    for (const auto& [k, v] : t.meta) {
        kv[k] = v;
    }
    try {
        return kernel_spec_from_key_values(kv);
    } catch (const InvalidArgument& e) {
        throw ParseError(t.source + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// PointSet: idx, x1..xd

inline std::string point_set_csv(const PointSet& ps, const Metadata& meta = {}) {
    CsvWriter w(meta);
    std::vector<std::string> names{"idx"};
    for (Index j = 0; j < ps.dim(); ++j) names.push_back("x" + std::to_string(j + 1));
    w.header(names);
    for (Index i = 0; i < ps.size(); ++i) {
        std::vector<std::string> f{std::to_string(ps.has_indices() ? ps.indices[i]
                                                                   : static_cast<std::size_t>(i))};
        for (Index j = 0; j < ps.dim(); ++j) f.push_back(format_double(ps.points(i, j)));
        w.row_strings(f);
    }
    return w.str();
}

inline PointSet point_set_from_csv(const CsvTable& t) {
    const auto idx_col = t.column("idx");
    std::vector<std::size_t> coord_cols;
    for (std::size_t j = 1;; ++j) {
        const auto name = "x" + std::to_string(j);
        bool found = false;
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            if (t.header[c] == name) {
                coord_cols.push_back(c);
                found = true;
            }
        }
        if (!found) break;
    }
    if (coord_cols.empty()) {
        throw ParseError(t.source + ": missing column 'x1'");
    }
    Eigen::MatrixXd pts(static_cast<Index>(t.rows.size()), static_cast<Index>(coord_cols.size()));
    std::vector<std::size_t> idx;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        try {
            idx.push_back(parse_index(t.rows[r][idx_col], "idx"));
        } catch (const ParseError& e) {
            throw ParseError(t.where(r) + ": " + e.what());
        }
        for (std::size_t j = 0; j < coord_cols.size(); ++j) {
            pts(static_cast<Index>(r), static_cast<Index>(j)) = t.number(r, coord_cols[j]);
        }
    }
    return PointSet(std::move(pts), std::move(idx));
}

// ---------------------------------------------------------------------------
// Pendulum trajectory: k, x1, x2, x1_next, x2_next, y_next

inline std::string trajectory_csv(const TrajectoryDataset& data, const Metadata& meta = {}) {
    if (data.state_dim() != 2 || data.output_dim() != 1) {
        throw InvalidArgument("trajectory_csv: expects 2-D states and scalar outputs");
    }
    CsvWriter w(meta);
    w.header({"k", "x1", "x2", "x1_next", "x2_next", "y_next"});
    for (Index r = 0; r < data.size(); ++r) {
        w.row_strings({std::to_string(data.steps[static_cast<std::size_t>(r)]),
                       format_double(data.states(r, 0)), format_double(data.states(r, 1)),
                       format_double(data.next_states(r, 0)),
                       format_double(data.next_states(r, 1)), format_double(data.outputs(r, 0))});
    }
    return w.str();
}

inline TrajectoryDataset trajectory_from_csv(const CsvTable& t) {
    const auto ck = t.column("k");
    const std::size_t cols[5] = {t.column("x1"), t.column("x2"), t.column("x1_next"),
                                 t.column("x2_next"), t.column("y_next")};
    const auto n = static_cast<Index>(t.rows.size());
    TrajectoryDataset data;
    data.states.resize(n, 2);
    data.next_states.resize(n, 2);
    data.outputs.resize(n, 1);
    for (Index r = 0; r < n; ++r) {
        const auto row = static_cast<std::size_t>(r);
        try {
            data.steps.push_back(parse_index(t.rows[row][ck], "k"));
        } catch (const ParseError& e) {
            throw ParseError(t.where(row) + ": " + e.what());
        }
        data.states.row(r) << t.number(row, cols[0]), t.number(row, cols[1]);
        data.next_states.row(r) << t.number(row, cols[2]), t.number(row, cols[3]);
        data.outputs(r, 0) = t.number(row, cols[4]);
    }
    if (!data.states.allFinite() || !data.next_states.allFinite() || !data.outputs.allFinite()) {
        throw ParseError(t.source + ": non-finite value in trajectory");
    }
    data.validate();
    return data;
}

// ---------------------------------------------------------------------------
// Estimate: kernel block + mode in the comment header, then one row per
// center: idx, c1..cd, a1..ad, alpha1..alphan.

inline std::string estimate_csv(const KoopmanEstimate& est, const Metadata& extra = {}) {
    Metadata meta{{"format", "kkoop-estimate-v1"}, {"mode", std::string(to_string(est.mode))}};
    for (auto& kv : kernel_metadata(est.kernel)) meta.push_back(kv);
    meta.emplace_back("jitter_used", format_double(est.diagnostics.jitter_used));
    meta.emplace_back("condition_number", format_double(est.diagnostics.condition_number));
    meta.emplace_back("min_eigenvalue", format_double(est.diagnostics.min_eigenvalue));
    for (const auto& kv : extra) meta.push_back(kv);

    const Index d = est.centers.dim();
    CsvWriter w(meta);
    std::vector<std::string> names{"idx"};
    for (Index j = 0; j < d; ++j) names.push_back("c" + std::to_string(j + 1));
    for (Index j = 0; j < d; ++j) names.push_back("a" + std::to_string(j + 1));
    for (Index j = 0; j < est.output_dim(); ++j) names.push_back("alpha" + std::to_string(j + 1));
    w.header(names);
    for (Index i = 0; i < est.size(); ++i) {
        std::vector<std::string> f{std::to_string(
            est.centers.has_indices() ? est.centers.indices[i] : static_cast<std::size_t>(i))};
        for (Index j = 0; j < d; ++j) f.push_back(format_double(est.centers.points(i, j)));
        for (Index j = 0; j < d; ++j) f.push_back(format_double(est.advanced_centers.points(i, j)));
        for (Index j = 0; j < est.output_dim(); ++j) f.push_back(format_double(est.alpha(i, j)));
        w.row_strings(f);
    }
    return w.str();
}

inline KoopmanEstimate estimate_from_csv(const CsvTable& t) {
    const auto* fmt = t.meta_value("format");
    if (fmt == nullptr || *fmt != "kkoop-estimate-v1") {
        throw ParseError(t.source + ": not an estimate file (missing '# format=kkoop-estimate-v1')");
    }
    KoopmanEstimate est;
    est.kernel = kernel_from_metadata(t);
    if (const auto* m = t.meta_value("mode")) {
        try {
            est.mode = parse_estimate_mode(*m);
        } catch (const InvalidArgument& e) {
            throw ParseError(t.source + ": " + e.what());
        }
    }
    const auto count = [&](const std::string& prefix) {
        Index n = 0;
        while (true) {
            const auto name = prefix + std::to_string(n + 1);
            bool found = false;
            for (const auto& h : t.header) found = found || h == name;
            if (!found) return n;
            ++n;
        }
    };
    const Index d = count("c");
    const Index n_out = count("alpha");
    if (d == 0 || count("a") != d || n_out == 0) {
        throw ParseError(t.source + ": estimate header needs c1..cd, a1..ad, alpha1..alphan");
    }
    const auto m = static_cast<Index>(t.rows.size());
    Eigen::MatrixXd c(m, d), a(m, d);
    est.alpha.resize(m, n_out);
    std::vector<std::size_t> idx, next;
    const auto ci = t.column("idx");
    for (Index r = 0; r < m; ++r) {
        const auto row = static_cast<std::size_t>(r);
        try {
            idx.push_back(parse_index(t.rows[row][ci], "idx"));
        } catch (const ParseError& e) {
            throw ParseError(t.where(row) + ": " + e.what());
        }
        next.push_back(idx.back() + 1);
        for (Index j = 0; j < d; ++j) {
            c(r, j) = t.number(row, t.column("c" + std::to_string(j + 1)));
            a(r, j) = t.number(row, t.column("a" + std::to_string(j + 1)));
        }
        for (Index j = 0; j < n_out; ++j) {
            est.alpha(r, j) = t.number(row, t.column("alpha" + std::to_string(j + 1)));
        }
    }
    est.centers = PointSet(std::move(c), std::move(idx));
    est.advanced_centers = PointSet(std::move(a), std::move(next));
    if (const auto* v = t.meta_value("jitter_used")) {
        est.diagnostics.jitter_used = parse_double(*v, "jitter_used");
    }
    if (const auto* v = t.meta_value("condition_number")) {
        est.diagnostics.condition_number = parse_double(*v, "condition_number");
    }
    if (const auto* v = t.meta_value("min_eigenvalue")) {
        est.diagnostics.min_eigenvalue = parse_double(*v, "min_eigenvalue");
    }
    est.diagnostics.coefficients = est.alpha;
    return est;
}

// ---------------------------------------------------------------------------
// Marker capture: t, hip_x..ankle_z

struct MarkerLoad {
    std::vector<MarkerFrame> frames;
    std::size_t skipped = 0;  // rows with missing or non-finite markers
};

inline MarkerLoad markers_from_csv(const CsvTable& t) {
    static constexpr const char* names[9] = {"hip_x",  "hip_y",  "hip_z",   "knee_x", "knee_y",
                                             "knee_z", "ankle_x", "ankle_y", "ankle_z"};
    const auto ct = t.column("t");
    std::size_t cols[9];
    for (int i = 0; i < 9; ++i) cols[i] = t.column(names[i]);

    MarkerLoad load;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        MarkerFrame f;
        double tv = 0.0;
        if (!try_parse_double(t.rows[r][ct], tv) || !std::isfinite(tv) || tv != std::floor(tv)) {
            throw ParseError(t.where(r) + ": frame index t must be an integer");
        }
        f.t = static_cast<long>(tv);
        double v[9];
        bool ok = true;
        for (int i = 0; i < 9; ++i) {
            if (!try_parse_double(t.rows[r][cols[i]], v[i])) {
                throw ParseError(t.where(r) + ": " + names[i] + ": not a number: '" +
                                 t.rows[r][cols[i]] + "'");
            }
            ok = ok && std::isfinite(v[i]);
        }
        if (!ok) {
            ++load.skipped;
            continue;
        }
        f.hip = {v[0], v[1], v[2]};
        f.knee = {v[3], v[4], v[5]};
        f.ankle = {v[6], v[7], v[8]};
        load.frames.push_back(f);
    }
    return load;
}

inline std::string markers_csv(const std::vector<MarkerFrame>& frames) {
    CsvWriter w;
    w.header({"t", "hip_x", "hip_y", "hip_z", "knee_x", "knee_y", "knee_z", "ankle_x", "ankle_y",
              "ankle_z"});
    for (const auto& f : frames) {
        std::vector<std::string> row{std::to_string(f.t)};
        for (const auto* v : {&f.hip, &f.knee, &f.ankle}) {
            for (int i = 0; i < 3; ++i) row.push_back(format_double((*v)(i)));
        }
        w.row_strings(row);
    }
    return w.str();
}

inline std::string angles_csv(const std::vector<JointAngleSample>& samples,
                              const Metadata& meta = {}) {
    CsvWriter w(meta);
    w.header({"t", "theta1", "theta2", "y1", "y2"});
    for (const auto& s : samples) {
        w.row_strings({std::to_string(s.t), format_double(s.theta1), format_double(s.theta2),
                       format_double(s.y1), format_double(s.y2)});
    }
    return w.str();
}

}  // namespace kkoop::io
