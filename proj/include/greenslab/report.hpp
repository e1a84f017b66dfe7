#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "greenslab/discretize.hpp"
#include "greenslab/kernel.hpp"
#include "greenslab/oracles.hpp"
#include "greenslab/positivity.hpp"

namespace greenslab {

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitInadmissible = 2;
inline constexpr int kExitTheorem = 3;

inline constexpr const char* kSchemaVersion = "greens-lab/1";
inline constexpr std::uint64_t kDefaultSeed = 20240001;

// ---------------------------------------------------------------------------
// configuration

struct PotentialSpec {
    enum class Kind { none, constant, gaussian_bump };
    Kind kind = Kind::none;
    int dimension = 1;
    double value = 0.0;      // constant
    double amplitude = 0.0;  // gaussian bump
    double cx = 0.5;
    double cy = 0.0;         // unused in 1D
    double width = 0.1;

    Potential to_function() const {
        switch (kind) {
            case Kind::none:
                return nullptr;
            case Kind::constant: {
                const double v = value;
                return [v](const Point&) { return v; };
            }
            case Kind::gaussian_bump: {
                const double a = amplitude, x0 = cx, y0 = cy, s = width;
                return [a, x0, y0, s](const Point& p) {
                    const double dx = p.x - x0, dy = p.y - y0;
                    return a * std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
                };
            }
        }
        return nullptr;
    }

    json describe() const {
        switch (kind) {
            case Kind::none:
                return json{{"kind", "none"}};
            case Kind::constant:
                return json{{"kind", "constant"}, {"value", value}};
            case Kind::gaussian_bump:
                return json{{"kind", "gaussian-bump"},
                            {"amplitude", amplitude},
                            {"center", dimension == 2 ? json::array({cx, cy})
                                                      : json::array({cx})},
                            {"width", width}};
        }
        return nullptr;
    }
};

/// Parse "constant:V" or "gaussian-bump:AMP,CX[,CY],WIDTH".
inline PotentialSpec parse_potential(const std::string& text, int dimension) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                args.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw PreconditionError("--potential: cannot parse number '" + item + "'");
            }
        }
    }
    PotentialSpec spec;
    spec.dimension = dimension;
    if (name == "constant") {
        if (args.size() != 1)
            throw PreconditionError("--potential constant:V takes exactly one value");
        spec.kind = PotentialSpec::Kind::constant;
        spec.value = args[0];
    } else if (name == "gaussian-bump") {
        const std::size_t expected = dimension == 1 ? 3 : 4;
        if (args.size() != expected)
            throw PreconditionError("--potential gaussian-bump takes AMP,CX" +
                                    std::string(dimension == 2 ? ",CY" : "") + ",WIDTH");
        spec.kind = PotentialSpec::Kind::gaussian_bump;
        spec.amplitude = args[0];
        spec.cx = args[1];
        spec.cy = dimension == 2 ? args[2] : 0.0;
        spec.width = args.back();
        if (!(spec.width > 0.0)) throw PreconditionError("--potential: width must be positive");
    } else {
        throw PreconditionError("--potential: unknown kind '" + name +
                                "' (use constant or gaussian-bump)");
    }
    return spec;
}

struct AnalyzeConfig {
    std::string family = "second-order-1d";
    Interval xb{0.0, 1.0};
    Interval yb{0.0, 1.0};
    int nx = 199;
    int ny = -1;  // 2D only; -1 means same as nx
    PotentialSpec potential;
    double tol_sing = 1e-12;
    ClassifyOptions classify;
    std::string out_json;      // empty: stdout
    std::string heatmap_csv;   // empty: no heatmaps
    bool timings = false;
};

struct SweepConfig {
    std::string family = "fourth-order-1d";
    Interval xb{0.0, 1.0};
    Interval yb{0.0, 1.0};
    int nx = 399;
    int ny = -1;
    std::string param = "c";
    double lo = 0.0;
    double hi = 1e6;
    int steps = 40;
    bool log_spacing = true;  // default; the oscillation scale grows like c^(1/4)
    double bisect_precision = 0.005;
    int jobs = 0;  // 0: hardware concurrency
    double tol_sing = 1e-12;
    ClassifyOptions classify;
    std::string out_json;
    bool timings = false;
};

struct OracleCheckConfig {
    std::string family = "second-order-1d";
    std::vector<int> ladder{49, 99, 199, 399};
    std::string out_json;
};

// ---------------------------------------------------------------------------
// deterministic file output

namespace detail {

inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PreconditionError("cannot open output file: " + path);
    out << text;
    if (!out) throw PreconditionError("failed writing output file: " + path);
}

inline std::string derive_csv_path(const std::string& base, const std::string& tag) {
    const auto slash = base.rfind('/');
    const auto dot = base.rfind('.');
    const bool has_ext = dot != std::string::npos &&
                         (slash == std::string::npos || dot > slash);
    if (!has_ext) return base + "_" + tag + ".csv";
    return base.substr(0, dot) + "_" + tag + base.substr(dot);
}

} // namespace detail

/// Matrix heatmap CSV: "i,j,x_i[,y_i],x_j[,y_j],value", row-major, full
/// precision, byte-deterministic for fixed inputs.
inline void emit_heatmap_csv(const Matrix& m, const Grid& grid, const std::string& path) {
    if (m.rows() != grid.size() || m.cols() != grid.size())
        throw PreconditionError("emit_heatmap_csv: matrix shape does not match grid");
    std::string text;
    text.reserve(static_cast<std::size_t>(m.size()) * 48 + 64);
    const bool two_d = grid.dimension() == 2;
    text += two_d ? "i,j,x_i,y_i,x_j,y_j,value\n" : "i,j,x_i,x_j,value\n";
    for (int i = 0; i < m.rows(); ++i) {
        const Point& pi = grid.node(i);
        for (int j = 0; j < m.cols(); ++j) {
            const Point& pj = grid.node(j);
            text += std::to_string(i);
            text += ',';
            text += std::to_string(j);
            text += ',';
            text += detail::format_full(pi.x);
            text += ',';
            if (two_d) {
                text += detail::format_full(pi.y);
                text += ',';
            }
            text += detail::format_full(pj.x);
            text += ',';
            if (two_d) {
                text += detail::format_full(pj.y);
                text += ',';
            }
            text += detail::format_full(m(i, j));
            text += '\n';
        }
    }
    detail::write_text_file(path, text);
}

/// Field CSV: "i,x_i[,y_i],value".
inline void emit_field_csv(const Field& f, const std::string& path) {
    const Grid& grid = *f.grid;
    std::string text = grid.dimension() == 2 ? "i,x_i,y_i,value\n" : "i,x_i,value\n";
    for (int i = 0; i < grid.size(); ++i) {
        text += std::to_string(i);
        text += ',';
        text += detail::format_full(grid.node(i).x);
        text += ',';
        if (grid.dimension() == 2) {
            text += detail::format_full(grid.node(i).y);
            text += ',';
        }
        text += detail::format_full(f.values[i]);
        text += '\n';
    }
    detail::write_text_file(path, text);
}

// ---------------------------------------------------------------------------
// report assembly

namespace detail {

inline json node_location(const Grid& grid, int index) {
    if (index < 0) return nullptr;
    const Point& p = grid.node(index);
    return grid.dimension() == 2 ? json::array({p.x, p.y}) : json::array({p.x});
}

inline json grid_json(const Grid& g) {
    json j;
    j["dimension"] = g.dimension();
    json bounds = json::array();
    json counts = json::array();
    json spacing = json::array();
    for (int a = 0; a < g.dimension(); ++a) {
        bounds.push_back(json::array({g.bounds(a).lo, g.bounds(a).hi}));
        counts.push_back(g.count(a));
        spacing.push_back(g.spacing(a));
    }
    j["bounds"] = bounds;
    j["counts"] = counts;
    j["spacing"] = spacing;
    j["unknowns"] = g.size();
    return j;
}

inline json admissibility_json(const AdmissibilityReport& adm) {
    return json{{"symmetry_defect", adm.symmetry_defect},
                {"smallest_pivot", adm.smallest_pivot},
                {"matrix_scale", adm.matrix_scale},
                {"invertible", adm.invertible},
                {"admissible", adm.admissible}};
}

inline json verdicts_json(const PositivityReport& rep, const Grid& grid) {
    json v;
    v["positive_operator"] = {{"verdict", verdict_name(rep.positive_operator)},
                              {"lambda_min", rep.lambda_min},
                              {"iterations", rep.lambda_min_iterations}};
    v["psd_quadratic_form"] = {{"verdict", verdict_name(rep.psd_quadratic_form)},
                               {"worst_sampled_form", rep.worst_sampled_form},
                               {"wkw_min_eigenvalue", rep.wkw_min_eigenvalue},
                               {"wkw_scale", rep.wkw_scale},
                               {"samples", rep.form_samples}};
    v["positivity_preserving"] = {{"verdict", verdict_name(rep.positivity_preserving)},
                                  {"min_entry", rep.min_kernel_entry},
                                  {"row", rep.min_entry_row},
                                  {"col", rep.min_entry_col},
                                  {"row_location", node_location(grid, rep.min_entry_row)},
                                  {"col_location", node_location(grid, rep.min_entry_col)}};
    v["row_mass_nonneg"] = {{"verdict", verdict_name(rep.row_mass_nonneg)},
                            {"min", rep.min_row_mass},
                            {"node", rep.min_row_mass_node},
                            {"location", node_location(grid, rep.min_row_mass_node)}};
    v["unit_load_nonneg"] = {{"verdict", verdict_name(rep.unit_load_nonneg)},
                             {"min", rep.min_unit_load},
                             {"node", rep.min_unit_load_node},
                             {"location", node_location(grid, rep.min_unit_load_node)}};
    v["mean_value_nonneg"] = {{"verdict", verdict_name(rep.mean_value_nonneg)},
                              {"worst_mean", rep.worst_mean},
                              {"samples", rep.mean_samples}};
    v["somewhere_positive"] = {{"verdict", verdict_name(rep.somewhere_positive)},
                               {"samples", rep.somewhere_positive_samples}};
    v["total_mass"] = rep.total_mass;
    v["equivalence_consistent"] = rep.equivalence_consistent;
    return v;
}

inline json witnesses_json(const PositivityReport& rep, const Grid& grid) {
    json w;
    if (rep.witness) {
        w["row_mass"] = {{"center", rep.witness->center_index},
                         {"location", node_location(grid, rep.witness->center_index)},
                         {"radius_cells", rep.witness->radius_cells},
                         {"mean", rep.witness->mean}};
    } else {
        w["row_mass"] = nullptr;
    }
    return w;
}

class StageClock {
public:
    explicit StageClock(bool enabled) : enabled_(enabled) {}
    void mark(const std::string& stage) {
        if (!enabled_) return;
        const auto now = std::chrono::steady_clock::now();
        stages_.push_back({stage, std::chrono::duration<double>(now - last_).count()});
        last_ = now;
    }
    json to_json() const {
        if (!enabled_) return nullptr;
        json j;
        for (const auto& [name, seconds] : stages_) j[name] = seconds;
        return j;
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
    std::vector<std::pair<std::string, double>> stages_;
};

} // namespace detail

// ---------------------------------------------------------------------------
// analyze pipeline

struct AnalysisOutcome {
    GridPtr grid;
    std::shared_ptr<const DiscreteOperator> op;
    AdmissibilityReport admissibility;
    std::optional<GreensKernel> kernel;
    std::optional<PositivityReport> report;
    double hs = 0.0;
};

inline GridPtr make_config_grid(const std::string& family_name, const Interval& xb,
                                const Interval& yb, int nx, int ny) {
    const OperatorFamily family = parse_family(family_name);
    if (family_dimension(family) == 1) return make_grid(xb, nx);
    return make_grid(xb, nx, yb, ny > 0 ? ny : nx);
}

/// Grid -> operator -> admissibility -> kernel -> classification.
inline AnalysisOutcome analyze_operator(const std::string& family_name, const Interval& xb,
                                        const Interval& yb, int nx, int ny,
                                        const Potential& potential, double tol_sing,
                                        const ClassifyOptions& opt) {
    AnalysisOutcome out;
    out.grid = make_config_grid(family_name, xb, yb, nx, ny);
    const ProblemSpec spec = make_problem(parse_family(family_name), out.grid, potential);
    out.op = std::make_shared<const DiscreteOperator>(discretize(spec));
    out.admissibility = admissibility_check(*out.op, 0.0, tol_sing);
    if (!out.admissibility.admissible) return out;
    out.kernel = build_greens_kernel(out.op, tol_sing);
    out.report = classify(*out.op, *out.kernel, opt);
    out.hs = hs_norm(*out.kernel);
    return out;
}

inline json analyze_report_json(const AnalyzeConfig& cfg, const AnalysisOutcome& outcome,
                                const json& timings) {
    json j;
    j["schema"] = kSchemaVersion;
    j["config"] = {{"command", "analyze"},
                   {"family", cfg.family},
                   {"grid", detail::grid_json(*outcome.grid)},
                   {"potential", cfg.potential.describe()},
                   {"seed", cfg.classify.seed},
                   {"tolerances",
                    {{"tol_sing", cfg.tol_sing},
                     {"eps_rel", cfg.classify.eps_rel},
                     {"psd_tol", cfg.classify.psd_tol}}},
                   {"samples",
                    {{"z", cfg.classify.z_samples},
                     {"mean_bumps", cfg.classify.mean_bump_samples},
                     {"mean_random", cfg.classify.mean_random_samples},
                     {"positive", cfg.classify.positive_samples}}}};
    json adm = detail::admissibility_json(outcome.admissibility);
    if (outcome.kernel) {
        adm["kernel_raw_asymmetry"] = outcome.kernel->raw_asymmetry;
        adm["inverse_residual"] = outcome.kernel->inverse_residual;
    }
    j["admissibility"] = adm;
    j["lambda_min"] = outcome.report ? json(outcome.report->lambda_min) : json(nullptr);
    j["hs_norm"] = outcome.kernel ? json(outcome.hs) : json(nullptr);
    j["verdicts"] = outcome.report ? detail::verdicts_json(*outcome.report, *outcome.grid)
                                   : json(nullptr);
    j["witnesses"] = outcome.report ? detail::witnesses_json(*outcome.report, *outcome.grid)
                                    : json(nullptr);
    j["timings"] = timings;
    return j;
}

inline int run_analyze(const AnalyzeConfig& cfg, std::ostream& console = std::cout) {
    detail::StageClock clock(cfg.timings);
    AnalysisOutcome outcome =
        analyze_operator(cfg.family, cfg.xb, cfg.yb, cfg.nx, cfg.ny,
                         cfg.potential.to_function(), cfg.tol_sing, cfg.classify);
    clock.mark("analyze");

    if (outcome.kernel && !cfg.heatmap_csv.empty()) {
        emit_heatmap_csv(outcome.kernel->k, *outcome.grid, cfg.heatmap_csv);
        emit_field_csv(row_mass_field(*outcome.kernel),
                       detail::derive_csv_path(cfg.heatmap_csv, "row_mass"));
        emit_field_csv(solve_unit_load(*outcome.op, cfg.tol_sing),
                       detail::derive_csv_path(cfg.heatmap_csv, "unit_load"));
        clock.mark("heatmaps");
    }

    const json report = analyze_report_json(cfg, outcome, clock.to_json());
    if (cfg.out_json.empty())
        console << report.dump(2) << "\n";
    else
        detail::write_text_file(cfg.out_json, report.dump(2) + "\n");

    if (!outcome.admissibility.admissible) return kExitInadmissible;
    if (theorem_check_failed(*outcome.report)) return kExitTheorem;
    return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep pipeline

struct SweepPoint {
    double c = 0.0;
    AdmissibilityReport admissibility;
    std::optional<PositivityReport> report;
};

inline std::vector<double> sweep_values(const SweepConfig& cfg) {
    if (cfg.steps < 2) throw PreconditionError("sweep needs at least 2 steps");
    if (!(cfg.hi > cfg.lo)) throw PreconditionError("sweep range must satisfy hi > lo");
    if (!std::isfinite(cfg.lo) || !std::isfinite(cfg.hi))
        throw PreconditionError("sweep range must be finite");
    std::vector<double> values;
    values.reserve(cfg.steps);
    if (!cfg.log_spacing) {
        for (int i = 0; i < cfg.steps; ++i)
            values.push_back(cfg.lo + (cfg.hi - cfg.lo) * i / (cfg.steps - 1));
        return values;
    }
    // log spacing; a zero (or nonpositive) lower end contributes the exact
    // endpoint and the geometric ladder starts six decades below hi
    double anchor = cfg.lo;
    int geom_steps = cfg.steps;
    if (cfg.lo <= 0.0) {
        values.push_back(cfg.lo);
        anchor = cfg.hi * 1e-6;
        geom_steps = cfg.steps - 1;
    }
    for (int i = 0; i < geom_steps; ++i) {
        const double f = geom_steps == 1 ? 1.0 : static_cast<double>(i) / (geom_steps - 1);
        values.push_back(anchor * std::pow(cfg.hi / anchor, f));
    }
    values.back() = cfg.hi;
    return values;
}

namespace detail {

template <typename Job>
void run_parallel(int jobs, int count, Job&& job) {
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                job(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace detail

struct SweepThreshold {
    double last_hold = 0.0;
    double first_fail = 0.0;
};

struct SweepOutcome {
    std::vector<double> values;
    std::vector<SweepPoint> points;
    std::optional<SweepThreshold> positivity_preserving;
    std::optional<SweepThreshold> row_mass_nonneg;
    bool equivalence_consistent = true;
    std::string failure;  // non-empty on assertion failures
    int exit_code = kExitOk;
};

inline SweepOutcome run_sweep_pipeline(const SweepConfig& cfg) {
    if (cfg.param != "c")
        throw PreconditionError("sweep parameter must be the constant potential 'c'");
    SweepOutcome out;
    out.values = sweep_values(cfg);
    const GridPtr grid = make_config_grid(cfg.family, cfg.xb, cfg.yb, cfg.nx, cfg.ny);
    const OperatorFamily family = parse_family(cfg.family);
    out.points.resize(out.values.size());

    auto classify_at = [&](double c, const ClassifyOptions& opt) {
        SweepPoint point;
        point.c = c;
        const ProblemSpec spec =
            make_problem(family, grid, [c](const Point&) { return c; });
        auto op = std::make_shared<const DiscreteOperator>(discretize(spec));
        point.admissibility = admissibility_check(*op, 0.0, cfg.tol_sing);
        if (!point.admissibility.admissible) return point;
        const GreensKernel kernel = build_greens_kernel(op, cfg.tol_sing);
        point.report = classify(*op, kernel, opt);
        return point;
    };

    detail::run_parallel(cfg.jobs, static_cast<int>(out.values.size()), [&](int i) {
        ClassifyOptions opt = cfg.classify;
        opt.seed = sampling::splitmix64(cfg.classify.seed ^ static_cast<std::uint64_t>(i));
        out.points[i] = classify_at(out.values[i], opt);
    });

    for (std::size_t i = 0; i < out.points.size(); ++i) {
        const SweepPoint& p = out.points[i];
        if (!p.admissibility.admissible) {
            out.failure = "sweep point c=" + std::to_string(p.c) + " is inadmissible";
            out.exit_code = kExitInadmissible;
            return out;
        }
        if (p.report->positive_operator != Verdict::holds) {
            out.failure = "sweep point c=" + std::to_string(p.c) +
                          " is not a positive operator (lambda_min = " +
                          std::to_string(p.report->lambda_min) + ")";
            out.exit_code = kExitInadmissible;
            return out;
        }
        if (theorem_check_failed(*p.report)) {
            out.failure = "theorem check failed at sweep point c=" + std::to_string(p.c);
            out.exit_code = kExitTheorem;
            return out;
        }
        out.equivalence_consistent =
            out.equivalence_consistent && p.report->equivalence_consistent;
    }

    // bisect each verdict change to the requested precision
    auto bisect = [&](auto&& fails_at) -> std::optional<SweepThreshold> {
        std::optional<int> change;
        for (std::size_t i = 1; i < out.points.size(); ++i)
            if (!fails_at(out.points[i - 1]) && fails_at(out.points[i])) {
                change = static_cast<int>(i);
                break;
            }
        if (!change) return std::nullopt;
        double lo = out.values[*change - 1], hi = out.values[*change];
        while (hi - lo > cfg.bisect_precision * std::max(1.0, hi)) {
            const double mid = 0.5 * (lo + hi);
            ClassifyOptions opt = cfg.classify;
            opt.z_samples = 0;  // thresholds only need the kernel quantities
            opt.mean_bump_samples = 0;
            opt.mean_random_samples = 0;
            opt.positive_samples = 0;
            const SweepPoint p = classify_at(mid, opt);
            if (fails_at(p)) hi = mid;
            else lo = mid;
        }
        return SweepThreshold{lo, hi};
    };

    out.positivity_preserving = bisect([](const SweepPoint& p) {
        return p.report->positivity_preserving == Verdict::fails;
    });
    out.row_mass_nonneg = bisect([](const SweepPoint& p) {
        return p.report->row_mass_nonneg == Verdict::fails;
    });
    return out;
}

inline json sweep_report_json(const SweepConfig& cfg, const SweepOutcome& out,
                              const json& timings) {
    json j;
    j["schema"] = kSchemaVersion;
    j["config"] = {{"command", "sweep"},
                   {"family", cfg.family},
                   {"param", cfg.param},
                   {"range", json::array({cfg.lo, cfg.hi})},
                   {"steps", cfg.steps},
                   {"log_spacing", cfg.log_spacing},
                   {"bisect_precision", cfg.bisect_precision},
                   {"n", cfg.nx},
                   {"seed", cfg.classify.seed},
                   {"tolerances",
                    {{"tol_sing", cfg.tol_sing},
                     {"eps_rel", cfg.classify.eps_rel},
                     {"psd_tol", cfg.classify.psd_tol}}}};
    json points = json::array();
    for (const SweepPoint& p : out.points) {
        if (!p.report) {
            points.push_back({{"c", p.c}, {"admissible", false}});
            continue;
        }
        const PositivityReport& r = *p.report;
        points.push_back({{"c", p.c},
                          {"lambda_min", r.lambda_min},
                          {"min_kernel_entry", r.min_kernel_entry},
                          {"min_row_mass", r.min_row_mass},
                          {"total_mass", r.total_mass},
                          {"verdicts",
                           {{"positive_operator", verdict_name(r.positive_operator)},
                            {"psd_quadratic_form", verdict_name(r.psd_quadratic_form)},
                            {"positivity_preserving", verdict_name(r.positivity_preserving)},
                            {"row_mass_nonneg", verdict_name(r.row_mass_nonneg)},
                            {"unit_load_nonneg", verdict_name(r.unit_load_nonneg)},
                            {"mean_value_nonneg", verdict_name(r.mean_value_nonneg)}}},
                          {"equivalence_consistent", r.equivalence_consistent},
                          {"witness", r.witness
                                          ? json{{"center", r.witness->center_index},
                                                 {"radius_cells", r.witness->radius_cells},
                                                 {"mean", r.witness->mean}}
                                          : json(nullptr)}});
    }
    j["points"] = points;
    auto threshold_json = [](const std::optional<SweepThreshold>& t) {
        return t ? json{{"last_hold", t->last_hold}, {"first_fail", t->first_fail}}
                 : json(nullptr);
    };
    j["thresholds"] = {{"positivity_preserving", threshold_json(out.positivity_preserving)},
                       {"row_mass_nonneg", threshold_json(out.row_mass_nonneg)}};
    j["equivalence_consistent"] = out.equivalence_consistent;
    if (!out.failure.empty()) j["failure"] = out.failure;
    j["timings"] = timings;
    return j;
}

inline int run_sweep(const SweepConfig& cfg, std::ostream& console = std::cout) {
    detail::StageClock clock(cfg.timings);
    const SweepOutcome outcome = run_sweep_pipeline(cfg);
    clock.mark("sweep");
    const json report = sweep_report_json(cfg, outcome, clock.to_json());
    if (cfg.out_json.empty())
        console << report.dump(2) << "\n";
    else
        detail::write_text_file(cfg.out_json, report.dump(2) + "\n");
    if (!outcome.failure.empty()) std::cerr << "sweep: " << outcome.failure << "\n";
    return outcome.exit_code;
}

// ---------------------------------------------------------------------------
// oracle-check pipeline

inline int run_oracle_check(const OracleCheckConfig& cfg, std::ostream& console = std::cout) {
    const OperatorFamily family = parse_family(cfg.family);
    if (family != OperatorFamily::SecondOrder1D && family != OperatorFamily::FourthOrder1D)
        throw PreconditionError("oracle-check supports second-order-1d and fourth-order-1d");
    if (cfg.ladder.size() < 2) throw PreconditionError("oracle-check needs a ladder of >= 2 sizes");
    for (std::size_t i = 1; i < cfg.ladder.size(); ++i)
        if (cfg.ladder[i] <= cfg.ladder[i - 1])
            throw PreconditionError("oracle-check ladder must be strictly increasing");

    json points = json::array();
    std::vector<double> errors;
    for (const int n : cfg.ladder) {
        const GridPtr grid = make_grid({0.0, 1.0}, n);
        const ProblemSpec spec = make_problem(family, grid);
        auto op = std::make_shared<const DiscreteOperator>(discretize(spec));
        const GreensKernel kernel = build_greens_kernel(op);
        double err = 0.0;
        if (family == OperatorFamily::SecondOrder1D) {
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    err = std::max(err, std::abs(kernel.k(i, j) -
                                                 exact_greens_second_order(grid->node(i).x,
                                                                           grid->node(j).x)));
        } else {
            for (int j = 0; j < n; ++j) {
                const auto cubics = beam_kernel_cubics(grid->node(j).x);
                for (int i = 0; i < n; ++i)
                    err = std::max(err, std::abs(kernel.k(i, j) -
                                                 eval_beam_cubics(cubics, grid->node(i).x,
                                                                  grid->node(j).x)));
            }
        }
        errors.push_back(err);
        const Field u = solve_unit_load(*op);
        points.push_back({{"n", n},
                          {"h", grid->spacing(0)},
                          {"kernel_max_error", err},
                          {"unit_load_mid", u.values[(n - 1) / 2]}});
    }
    json ratios = json::array();
    for (std::size_t i = 1; i < errors.size(); ++i)
        ratios.push_back(errors[i - 1] / errors[i]);

    json j;
    j["schema"] = kSchemaVersion;
    j["config"] = {{"command", "oracle-check"}, {"family", cfg.family}, {"ladder", cfg.ladder}};
    j["points"] = points;
    j["ratios"] = ratios;
    if (cfg.out_json.empty())
        console << j.dump(2) << "\n";
    else
        detail::write_text_file(cfg.out_json, j.dump(2) + "\n");
    return kExitOk;
}

} // namespace greenslab
