#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "greenslab/kernel.hpp"
#include "greenslab/linalg.hpp"

namespace greenslab {

enum class Verdict { holds, fails, not_applicable };

inline std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        case Verdict::not_applicable: return "not-applicable";
    }
    return "?";
}

/// Shared tolerance policy: a value fails nonnegativity iff it drops below
/// -eps_rel * scale, with the scale named per quantity.  One policy for all
/// three equivalence verdicts keeps their comparison meaningful.
inline Verdict nonneg_verdict(double value, double scale, double eps_rel) {
    return value < -eps_rel * scale ? Verdict::fails : Verdict::holds;
}

/// A constructed nonnegative load whose solution has negative mean: the
/// Field, the ball it lives on, and the mean it achieves.
struct WitnessF {
    Field f;
    int center_index = -1;
    int radius_cells = 0;  // 0 marks the degenerate single-node load
    double mean = 0.0;
};

struct PositivityReport {
    Verdict positive_operator = Verdict::not_applicable;
    double lambda_min = 0.0;
    int lambda_min_iterations = 0;

    Verdict psd_quadratic_form = Verdict::not_applicable;
    double worst_sampled_form = 0.0;   // most negative sampled margin-adjusted value
    double wkw_min_eigenvalue = 0.0;
    double wkw_scale = 0.0;            // max|WKW|
    int form_samples = 0;

    Verdict positivity_preserving = Verdict::not_applicable;
    double min_kernel_entry = 0.0;
    int min_entry_row = -1;
    int min_entry_col = -1;

    Verdict row_mass_nonneg = Verdict::not_applicable;
    double min_row_mass = 0.0;
    int min_row_mass_node = -1;

    Verdict unit_load_nonneg = Verdict::not_applicable;
    double min_unit_load = 0.0;
    int min_unit_load_node = -1;

    Verdict mean_value_nonneg = Verdict::not_applicable;
    double worst_mean = 0.0;
    int mean_samples = 0;

    double total_mass = 0.0;
    bool equivalence_consistent = false;
    std::optional<WitnessF> witness;

    // informational: the somewhere-positive conclusion for strictly positive
    // loads on positive operators
    Verdict somewhere_positive = Verdict::not_applicable;
    int somewhere_positive_samples = 0;
};

// ---------------------------------------------------------------------------
// sampling

namespace sampling {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

inline double node_distance(const Point& a, const Point& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Polynomial bump (1 - (d/r)^2)^2 supported on the open ball of radius
/// r = radius_cells * min-spacing around a node; exactly zero outside.
inline Field bump_field(const GridPtr& grid, int center_index, int radius_cells) {
    const double h = grid->dimension() == 1
                         ? grid->spacing(0)
                         : std::min(grid->spacing(0), grid->spacing(1));
    const double r = radius_cells * h;
    const Point c = grid->node(center_index);
    Field f;
    f.grid = grid;
    f.values = Vector::Zero(grid->size());
    for (int i = 0; i < grid->size(); ++i) {
        const double d = node_distance(grid->node(i), c);
        if (d < r) {
            const double s = 1.0 - (d / r) * (d / r);
            f.values[i] = s * s;
        }
    }
    return f;
}

/// Deterministic bump set: centers on a coarse sublattice, radii cycling
/// through {2, 4, 8} grid cells.
inline std::vector<Field> bump_sample_set(const GridPtr& grid, int count) {
    std::vector<int> centers;
    const int m = grid->size();
    if (grid->dimension() == 1) {
        const int n_centers = std::max(1, (count + 2) / 3);
        for (int j = 0; j < n_centers; ++j)
            centers.push_back(static_cast<int>((j + 0.5) * m / n_centers));
    } else {
        const int per_axis = std::max(1, static_cast<int>(std::ceil(
                                              std::sqrt((count + 2.0) / 3.0))));
        for (int jx = 0; jx < per_axis; ++jx)
            for (int jy = 0; jy < per_axis; ++jy) {
                const int ix = static_cast<int>((jx + 0.5) * grid->count(0) / per_axis);
                const int iy = static_cast<int>((jy + 0.5) * grid->count(1) / per_axis);
                centers.push_back(grid->index2d(ix, iy));
            }
    }
    static const int radii[3] = {2, 4, 8};
    std::vector<Field> out;
    out.reserve(count);
    for (std::size_t j = 0; out.size() < static_cast<std::size_t>(count); ++j) {
        const int center = centers[j % centers.size()];
        const int radius = radii[(j / centers.size()) % 3];
        out.push_back(bump_field(grid, center, radius));
    }
    return out;
}

/// Gaussian noise clamped at zero: nonnegative, frequently touching zero.
inline Field clamped_gaussian_field(const GridPtr& grid, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Field f;
    f.grid = grid;
    f.values.resize(grid->size());
    for (int i = 0; i < grid->size(); ++i) f.values[i] = std::max(normal(rng), 0.0);
    return f;
}

inline Field strictly_positive_field(const GridPtr& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Field f;
    f.grid = grid;
    f.values.resize(grid->size());
    for (int i = 0; i < grid->size(); ++i) f.values[i] = 0.1 + uniform(rng);
    return f;
}

inline Field gaussian_field(const GridPtr& grid, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Field f;
    f.grid = grid;
    f.values.resize(grid->size());
    for (int i = 0; i < grid->size(); ++i) f.values[i] = normal(rng);
    return f;
}

} // namespace sampling

// ---------------------------------------------------------------------------
// kernel functionals

/// sum_ij w_i z_i K_ij w_j z_j, evaluated as the integral of z .* (G z) so
/// that z = 1 reproduces total_mass bit for bit.
inline double quadratic_form(const GreensKernel& kernel, const Field& z) {
    detail::require_same_grid(*kernel.grid, *z.grid, "quadratic_form");
    Field gz = apply_kernel(kernel, z);
    gz.values = z.values.cwiseProduct(gz.values);
    return integrate(gz, kernel.weights);
}

/// sum_ij w_i w_j K_ij = quadratic form at z = 1.
inline double total_mass(const GreensKernel& kernel) {
    return quadratic_form(kernel, constant_field(kernel.grid, 1.0));
}

/// values[i] = sum_j w_j K_ij: the discrete row-mass function.
inline Field row_mass_field(const GreensKernel& kernel) {
    return apply_kernel(kernel, constant_field(kernel.grid, 1.0));
}

/// Fresh factorization solve of A u = 1; the independent route to the same
/// vector as row_mass_field.
inline Field solve_unit_load(const DiscreteOperator& op, double tol_sing = 1e-12) {
    const SymmetricFactorization f = factor_symmetric(op.matrix, tol_sing);
    Field u;
    u.grid = op.grid;
    u.values = solve(f, Vector::Ones(op.grid->size()));
    return u;
}

struct MinEntry {
    double value = 0.0;
    int row = -1;
    int col = -1;
};

/// Smallest kernel entry and the first location (row-major) attaining it.
inline MinEntry min_kernel_entry(const GreensKernel& kernel) {
    MinEntry best;
    best.value = std::numeric_limits<double>::infinity();
    const Matrix& k = kernel.k;
    for (int i = 0; i < k.rows(); ++i)
        for (int j = 0; j < k.cols(); ++j)
            if (k(i, j) < best.value) {
                best.value = k(i, j);
                best.row = i;
                best.col = j;
            }
    return best;
}

namespace detail {

inline int argmin_index(const Vector& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v[i] < v[best]) best = i;
    return best;
}

} // namespace detail

/// Build a nonnegative load with negative solution mean, when one exists.
/// The ball grows from one cell while the row mass stays negative on it, the
/// polynomial bump is tried at shrinking radii, and the single-node load
/// e_i / w_i closes the construction: its mean equals the negative row mass
/// exactly.
inline std::optional<WitnessF> bump_witness(const GreensKernel& kernel,
                                            double eps_rel = 1e-8) {
    const Field rm = row_mass_field(kernel);
    const double scale = rm.values.cwiseAbs().maxCoeff();
    const int center = detail::argmin_index(rm.values);
    if (nonneg_verdict(rm.values[center], scale, eps_rel) == Verdict::holds)
        return std::nullopt;

    const GridPtr& grid = kernel.grid;
    const double h = grid->dimension() == 1
                         ? grid->spacing(0)
                         : std::min(grid->spacing(0), grid->spacing(1));
    const Point c = grid->node(center);
    const double span = grid->dimension() == 1
                            ? grid->bounds(0).length()
                            : std::max(grid->bounds(0).length(), grid->bounds(1).length());
    const int max_cells = static_cast<int>(span / h) + 2;

    int radius = 1;
    while (radius + 1 <= max_cells) {
        const double r = (radius + 1) * h;
        bool all_negative = true;
        for (int i = 0; i < grid->size() && all_negative; ++i)
            if (sampling::node_distance(grid->node(i), c) < r && !(rm.values[i] < 0.0))
                all_negative = false;
        if (!all_negative) break;
        ++radius;
    }

    for (; radius >= 1; --radius) {
        WitnessF w;
        w.f = sampling::bump_field(grid, center, radius);
        w.center_index = center;
        w.radius_cells = radius;
        w.mean = integrate(apply_kernel(kernel, w.f), kernel.weights);
        if (w.mean < 0.0) return w;
    }

    // degenerate single-node load: mean == row mass at the center, exactly
    WitnessF w;
    w.f.grid = grid;
    w.f.values = Vector::Zero(grid->size());
    w.f.values[center] = 1.0 / kernel.weights.w[center];
    w.center_index = center;
    w.radius_cells = 0;
    w.mean = integrate(apply_kernel(kernel, w.f), kernel.weights);
    if (w.mean < 0.0) return w;

    throw WitnessConstructionError(
        "bump_witness: single-node load at node " + std::to_string(center) +
        " has nonnegative mean despite negative row mass " +
        std::to_string(rm.values[center]));
}

struct SomewherePositive {
    bool positive = false;
    int max_node = -1;
    double max_value = 0.0;
};

/// For strictly positive f on a positive operator the solution must be
/// positive somewhere; a false return marks a correctness failure upstream.
inline SomewherePositive somewhere_positive_check(const GreensKernel& kernel,
                                                  const Field& f, double lambda_min) {
    detail::require_same_grid(*kernel.grid, *f.grid, "somewhere_positive_check");
    if (!(lambda_min > 0.0))
        throw PreconditionError("somewhere_positive_check: operator is not positive");
    for (int i = 0; i < f.values.size(); ++i)
        if (!(f.values[i] > 0.0))
            throw PreconditionError("somewhere_positive_check: f not strictly positive at node " +
                                    std::to_string(i));
    const Field u = apply_kernel(kernel, f);
    SomewherePositive out;
    out.max_node = 0;
    for (int i = 1; i < u.values.size(); ++i)
        if (u.values[i] > u.values[out.max_node]) out.max_node = i;
    out.max_value = u.values[out.max_node];
    out.positive = out.max_value > 0.0;
    return out;
}

struct ClassifyOptions {
    double eps_rel = 1e-8;   // shared nonnegativity policy
    double psd_tol = 1e-9;   // quadratic-form and WKW eigenvalue tolerance
    int z_samples = 1000;
    int mean_bump_samples = 50;
    int mean_random_samples = 50;
    int positive_samples = 50;
    std::uint64_t seed = 20240001;
    double eig_tol = 1e-12;
    int eig_max_iter = 10000;
};

/// Run the whole positivity hierarchy on one operator/kernel pair.
inline PositivityReport classify(const DiscreteOperator& op, const GreensKernel& kernel,
                                 const ClassifyOptions& opt = {}) {
    PositivityReport rep;
    const GridPtr& grid = kernel.grid;
    const Vector& w = kernel.weights.w;

    // positive operator: smallest eigenvalue of A
    const EigenEstimate lam = min_eigenvalue(op.matrix, opt.eig_tol, opt.eig_max_iter);
    rep.lambda_min = lam.value;
    rep.lambda_min_iterations = lam.iterations;
    rep.positive_operator = lam.value > 0.0 ? Verdict::holds : Verdict::fails;

    // quadratic form: sampled z plus a direct eigenvalue check of WKW
    const Matrix wkw = w.asDiagonal() * kernel.k * w.asDiagonal();
    rep.wkw_scale = wkw.cwiseAbs().maxCoeff();
    rep.wkw_min_eigenvalue =
        Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (wkw + wkw.transpose()),
                                              Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
    bool form_ok = rep.wkw_min_eigenvalue >= -opt.psd_tol * rep.wkw_scale;
    auto z_rng = sampling::engine(opt.seed, 0x5a5a);
    rep.worst_sampled_form = std::numeric_limits<double>::infinity();
    for (int s = 0; s < opt.z_samples; ++s) {
        const Field z = sampling::gaussian_field(grid, z_rng);
        const double q = quadratic_form(kernel, z);
        const double allowance = opt.psd_tol * z.values.squaredNorm() * rep.wkw_scale;
        rep.worst_sampled_form = std::min(rep.worst_sampled_form, q);
        if (q < -allowance) form_ok = false;
    }
    rep.form_samples = opt.z_samples;
    rep.psd_quadratic_form = form_ok ? Verdict::holds : Verdict::fails;

    // positivity preservation: smallest kernel entry
    const MinEntry me = min_kernel_entry(kernel);
    rep.min_kernel_entry = me.value;
    rep.min_entry_row = me.row;
    rep.min_entry_col = me.col;
    rep.positivity_preserving =
        nonneg_verdict(me.value, kernel.k.cwiseAbs().maxCoeff(), opt.eps_rel);

    // row mass and its independent unit-load route
    const Field rm = row_mass_field(kernel);
    rep.min_row_mass_node = detail::argmin_index(rm.values);
    rep.min_row_mass = rm.values[rep.min_row_mass_node];
    rep.row_mass_nonneg =
        nonneg_verdict(rep.min_row_mass, rm.values.cwiseAbs().maxCoeff(), opt.eps_rel);

    const Field ul = solve_unit_load(op);
    rep.min_unit_load_node = detail::argmin_index(ul.values);
    rep.min_unit_load = ul.values[rep.min_unit_load_node];
    rep.unit_load_nonneg =
        nonneg_verdict(rep.min_unit_load, ul.values.cwiseAbs().maxCoeff(), opt.eps_rel);

    // witness construction when the row mass dips negative
    if (rep.row_mass_nonneg == Verdict::fails)
        rep.witness = bump_witness(kernel, opt.eps_rel);

    // mean values over nonnegative loads; the witness load, when one exists,
    // joins the sample set
    const double kmax = kernel.k.cwiseAbs().maxCoeff();
    std::vector<Field> loads = sampling::bump_sample_set(grid, opt.mean_bump_samples);
    auto f_rng = sampling::engine(opt.seed, 0xf00d);
    for (int s = 0; s < opt.mean_random_samples; ++s)
        loads.push_back(sampling::clamped_gaussian_field(grid, f_rng));
    if (rep.witness) loads.push_back(rep.witness->f);
    bool mean_ok = true;
    rep.worst_mean = std::numeric_limits<double>::infinity();
    for (const Field& f : loads) {
        const double mean = integrate(apply_kernel(kernel, f), kernel.weights);
        rep.worst_mean = std::min(rep.worst_mean, mean);
        const double scale = f.values.cwiseAbs().maxCoeff() * kmax;
        if (nonneg_verdict(mean, scale, opt.eps_rel) == Verdict::fails) mean_ok = false;
    }
    rep.mean_samples = static_cast<int>(loads.size());
    rep.mean_value_nonneg = mean_ok ? Verdict::holds : Verdict::fails;

    rep.total_mass = total_mass(kernel);

    rep.equivalence_consistent = rep.row_mass_nonneg == rep.unit_load_nonneg &&
                                 rep.unit_load_nonneg == rep.mean_value_nonneg;

    // somewhere-positive conclusion for strictly positive loads
    if (rep.positive_operator == Verdict::holds) {
        auto p_rng = sampling::engine(opt.seed, 0xbeef);
        bool all_positive = true;
        for (int s = 0; s < opt.positive_samples; ++s) {
            const Field f = sampling::strictly_positive_field(grid, p_rng);
            if (!somewhere_positive_check(kernel, f, rep.lambda_min).positive)
                all_positive = false;
        }
        rep.somewhere_positive_samples = opt.positive_samples;
        rep.somewhere_positive = all_positive ? Verdict::holds : Verdict::fails;
    }

    return rep;
}

/// True when the report contradicts a theorem: a bug, not an input property.
inline bool theorem_check_failed(const PositivityReport& rep) {
    if (rep.positive_operator == Verdict::holds &&
        rep.psd_quadratic_form == Verdict::fails)
        return true;
    if (!rep.equivalence_consistent) return true;
    if (rep.somewhere_positive == Verdict::fails) return true;
    return false;
}

} // namespace greenslab
