// Command-line front end: configure a problem, run the analysis pipeline,
// sweep a potential range for positivity-preservation failures, or run the
// oracle convergence study.
//
// Exit codes: 0 success, 1 configuration or operational error,
// 2 inadmissible operator, 3 internal theorem-check failure.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "greenslab/greenslab.hpp"

namespace {

void apply_bounds(const std::vector<double>& bounds, greenslab::Interval& xb,
                  greenslab::Interval& yb) {
    if (bounds.empty()) return;
    if (bounds.size() != 2 && bounds.size() != 4)
        throw greenslab::PreconditionError("--bounds takes a,b for 1D or a,b,c,d for 2D");
    xb = {bounds[0], bounds[1]};
    if (bounds.size() == 4) yb = {bounds[2], bounds[3]};
}

void apply_counts(const std::vector<int>& counts, int& nx, int& ny) {
    if (counts.empty()) return;
    if (counts.size() > 2)
        throw greenslab::PreconditionError("--n takes N or NX,NY");
    nx = counts[0];
    ny = counts.size() == 2 ? counts[1] : -1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete Green's operators and their positivity classification"};
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "classify one operator");
    std::vector<int> a_counts;
    std::vector<double> a_bounds;
    std::string a_family = "second-order-1d";
    std::string a_potential;
    double a_c = 0.0;
    bool a_c_given = false;
    greenslab::AnalyzeConfig acfg;
    analyze->add_option("--family", a_family, "operator family")->required();
    analyze->add_option("--n", a_counts, "interior nodes per axis (N or NX,NY)")
        ->delimiter(',')
        ->required();
    analyze->add_option("--c", a_c, "constant potential value")
        ->each([&](const std::string&) { a_c_given = true; });
    analyze->add_option("--potential", a_potential,
                        "potential spec: constant:V or gaussian-bump:AMP,CX[,CY],WIDTH");
    analyze->add_option("--bounds", a_bounds, "domain bounds a,b or a,b,c,d")->delimiter(',');
    analyze->add_option("--seed", acfg.classify.seed, "random seed");
    analyze->add_option("--tol-sing", acfg.tol_sing, "singularity tolerance");
    analyze->add_option("--eps-rel", acfg.classify.eps_rel, "nonnegativity tolerance policy");
    analyze->add_option("--z-samples", acfg.classify.z_samples, "quadratic-form samples");
    analyze->add_option("--out", acfg.out_json, "report JSON path (default: stdout)");
    analyze->add_option("--heatmap", acfg.heatmap_csv,
                        "kernel heatmap CSV path; row-mass and unit-load CSVs are derived");
    analyze->add_flag("--timings", acfg.timings, "include stage timings in the report");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "classify along a potential range");
    std::vector<int> s_counts;
    std::vector<double> s_bounds;
    std::vector<double> s_range;
    bool s_linear = false;
    bool s_log = false;
    greenslab::SweepConfig scfg;
    sweep->add_option("--family", scfg.family, "operator family")->required();
    sweep->add_option("--n", s_counts, "interior nodes per axis (N or NX,NY)")
        ->delimiter(',')
        ->required();
    sweep->add_option("--param", scfg.param, "swept parameter (only 'c')");
    sweep->add_option("--range", s_range, "sweep range lo,hi")->delimiter(',')->required();
    sweep->add_option("--steps", scfg.steps, "number of sweep points")->required();
    sweep->add_flag("--log", s_log, "log-spaced sweep values (default)");
    sweep->add_flag("--linear", s_linear, "linearly spaced sweep values");
    sweep->add_option("--bisect-precision", scfg.bisect_precision,
                      "relative width at which threshold bisection stops");
    sweep->add_option("--bounds", s_bounds, "domain bounds a,b or a,b,c,d")->delimiter(',');
    sweep->add_option("--seed", scfg.classify.seed, "random seed");
    sweep->add_option("--jobs", scfg.jobs, "concurrent sweep workers (0: all cores)");
    sweep->add_option("--tol-sing", scfg.tol_sing, "singularity tolerance");
    sweep->add_option("--eps-rel", scfg.classify.eps_rel, "nonnegativity tolerance policy");
    sweep->add_option("--z-samples", scfg.classify.z_samples, "quadratic-form samples");
    sweep->add_option("--out", scfg.out_json, "sweep JSON path (default: stdout)");
    sweep->add_flag("--timings", scfg.timings, "include stage timings in the report");

    // oracle-check
    auto* oracle = app.add_subcommand("oracle-check", "kernel convergence vs exact oracles");
    greenslab::OracleCheckConfig ocfg;
    oracle->add_option("--family", ocfg.family, "second-order-1d or fourth-order-1d")
        ->required();
    oracle->add_option("--ladder", ocfg.ladder, "grid sizes, strictly increasing")
        ->delimiter(',');
    oracle->add_option("--out", ocfg.out_json, "convergence JSON path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) {
            apply_bounds(a_bounds, acfg.xb, acfg.yb);
            apply_counts(a_counts, acfg.nx, acfg.ny);
            acfg.family = a_family;
            if (!a_potential.empty() && a_c_given)
                throw greenslab::PreconditionError("give either --c or --potential, not both");
            const int dim = greenslab::family_dimension(greenslab::parse_family(a_family));
            if (!a_potential.empty()) {
                acfg.potential = greenslab::parse_potential(a_potential, dim);
            } else if (a_c_given) {
                acfg.potential.kind = greenslab::PotentialSpec::Kind::constant;
                acfg.potential.dimension = dim;
                acfg.potential.value = a_c;
            }
            return greenslab::run_analyze(acfg);
        }
        if (*sweep) {
            apply_bounds(s_bounds, scfg.xb, scfg.yb);
            apply_counts(s_counts, scfg.nx, scfg.ny);
            if (s_range.size() != 2)
                throw greenslab::PreconditionError("--range takes exactly lo,hi");
            scfg.lo = s_range[0];
            scfg.hi = s_range[1];
            if (s_linear && s_log)
                throw greenslab::PreconditionError("give either --log or --linear, not both");
            scfg.log_spacing = !s_linear;
            return greenslab::run_sweep(scfg);
        }
        return greenslab::run_oracle_check(ocfg);
    } catch (const greenslab::WitnessConstructionError& e) {
        std::cerr << "theorem-check failure: " << e.what() << "\n";
        return greenslab::kExitTheorem;
    } catch (const greenslab::SingularError& e) {
        std::cerr << "inadmissible operator: " << e.what() << "\n";
        return greenslab::kExitInadmissible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return greenslab::kExitConfig;
    }
}
