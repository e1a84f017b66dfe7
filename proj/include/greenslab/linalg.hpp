#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "greenslab/errors.hpp"
#include "greenslab/grid.hpp"

namespace greenslab {

namespace detail {

// Deterministic start: normalized all-ones plus a fixed perturbation, so the
// iteration cannot begin exactly orthogonal to the target eigenvector.
inline Vector deterministic_start(int m) {
    Vector x(m);
    for (int i = 0; i < m; ++i) x[i] = 1.0 + 1e-8 * std::sin(static_cast<double>(i + 1));
    x.normalize();
    return x;
}

} // namespace detail

/// Pivoted LDL^T factorization of an exactly-symmetric dense matrix, with
/// pivot diagnostics.  A copy of the input is retained for residual checks
/// and iterative refinement.
class SymmetricFactorization {
public:
    explicit SymmetricFactorization(Matrix a) : a_(std::move(a)), ldlt_(a_) {
        scale_ = a_.size() == 0 ? 0.0 : a_.cwiseAbs().maxCoeff();
        const Vector d = ldlt_.vectorD();
        smallest_pivot_ = d.size() == 0 ? 0.0 : d.cwiseAbs().minCoeff();
        positive_pivots_ = d.size() > 0 && (d.array() > 0.0).all();
        smallest_eig_bound_ = estimate_smallest_magnitude();
    }

    const Matrix& matrix() const { return a_; }
    int size() const { return static_cast<int>(a_.rows()); }

    /// max |a_ij| of the factored matrix.
    double scale() const { return scale_; }
    double smallest_pivot() const { return smallest_pivot_; }

    /// Upper bound on the smallest eigenvalue magnitude, from a few inverse
    /// iteration steps; the pivoted factorization alone can overestimate the
    /// distance to singularity by orders of magnitude.
    double smallest_eigenvalue_bound() const { return smallest_eig_bound_; }

    /// All pivots strictly positive: the Cholesky-type certificate of
    /// positive definiteness.
    bool positive_pivots() const { return positive_pivots_; }

    bool is_singular(double tol_sing) const {
        return std::min(smallest_pivot_, smallest_eig_bound_) < tol_sing * scale_;
    }

    /// Single triangular solve, no refinement.
    Vector solve_once(const Vector& rhs) const { return ldlt_.solve(rhs); }
    Matrix solve_once(const Matrix& rhs) const { return ldlt_.solve(rhs); }

    /// P^T L D L^T P, for factor-quality checks.
    Matrix reconstructed() const { return ldlt_.reconstructedMatrix(); }

private:
    double estimate_smallest_magnitude() const {
        const int m = size();
        if (m == 0) return 0.0;
        Vector x = detail::deterministic_start(m);
        double bound = std::numeric_limits<double>::infinity();
        for (int step = 0; step < 8; ++step) {
            const Vector y = ldlt_.solve(x);
            const double ny = y.norm();
            if (!std::isfinite(ny) || ny == 0.0) return 0.0;
            bound = std::min(bound, 1.0 / ny);  // ||x|| = 1
            x = y / ny;
        }
        return bound;
    }

    Matrix a_;
    Eigen::LDLT<Matrix> ldlt_;
    double scale_ = 0.0;
    double smallest_pivot_ = 0.0;
    bool positive_pivots_ = false;
    double smallest_eig_bound_ = 0.0;
};

/// Factor a symmetric matrix; throws SingularError when the smaller of the
/// smallest pivot and the smallest-eigenvalue bound falls below
/// tol_sing * max|a|.
inline SymmetricFactorization factor_symmetric(Matrix a, double tol_sing = 1e-12) {
    if (a.rows() != a.cols())
        throw PreconditionError("factor_symmetric: matrix not square");
    if (a.size() > 0 && (a - a.transpose()).cwiseAbs().maxCoeff() != 0.0)
        throw PreconditionError("factor_symmetric: matrix not exactly symmetric");
    SymmetricFactorization f(std::move(a));
    if (f.is_singular(tol_sing))
        throw SingularError(
            "factor_symmetric: smallest pivot " + std::to_string(f.smallest_pivot()) +
            ", eigenvalue bound " + std::to_string(f.smallest_eigenvalue_bound()) +
            " below tolerance " + std::to_string(tol_sing) + " * " +
            std::to_string(f.scale()));
    return f;
}

/// Solve A x = rhs with iterative refinement until
/// ||A x - rhs||_2 <= 1e-10 * max|A| * ||x||_2 (a few passes suffice).
inline Vector solve(const SymmetricFactorization& f, const Vector& rhs) {
    if (rhs.size() != f.size())
        throw PreconditionError("solve: rhs length " + std::to_string(rhs.size()) +
                                " does not match matrix size " + std::to_string(f.size()));
    Vector x = f.solve_once(rhs);
    for (int pass = 0; pass < 3; ++pass) {
        const Vector r = rhs - f.matrix() * x;
        if (r.norm() <= 0.5e-10 * f.scale() * x.norm()) break;
        x += f.solve_once(r);
    }
    return x;
}

struct InverseResult {
    Matrix inverse;             // symmetrized, (B + B^T)/2
    double presym_defect;       // max |B - B^T| before symmetrization
    double presym_max;          // max |B| before symmetrization
    double residual_max;        // max |A B - I| for the raw inverse
};

/// Full inverse by multi-rhs solve against the identity, refined once when
/// the residual asks for it, then symmetrized with the defect recorded.
inline InverseResult invert(const SymmetricFactorization& f) {
    const int m = f.size();
    const Matrix id = Matrix::Identity(m, m);
    Matrix b = f.solve_once(id);
    Matrix r = id - f.matrix() * b;
    double res = r.cwiseAbs().maxCoeff();
    if (res > 5e-10) {
        b += f.solve_once(r);
        r = id - f.matrix() * b;
        res = r.cwiseAbs().maxCoeff();
    }
    InverseResult out;
    out.presym_defect = (b - b.transpose()).cwiseAbs().maxCoeff();
    out.presym_max = b.cwiseAbs().maxCoeff();
    out.residual_max = res;
    out.inverse = 0.5 * (b + b.transpose());
    return out;
}

struct EigenEstimate {
    double value = 0.0;
    int iterations = 0;
};

namespace detail {

inline double rayleigh(const Matrix& a, const Vector& x) {
    return x.dot(a * x) / x.dot(x);
}

inline double gershgorin_lower_bound(const Matrix& a) {
    double lo = std::numeric_limits<double>::max();
    for (int i = 0; i < a.rows(); ++i) {
        const double radius = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
        lo = std::min(lo, a(i, i) - radius);
    }
    return lo;
}

// Rayleigh quotients computed against A carry roundoff of order eps * ||A||;
// convergence deltas below this level are noise.
inline double rayleigh_noise_floor(const Matrix& a) {
    const double norm_inf = a.cwiseAbs().rowwise().sum().maxCoeff();
    return 32.0 * std::numeric_limits<double>::epsilon() * norm_inf;
}

// Eigenvalues strictly below sigma, by factorization inertia.
inline int eigen_count_below(const Matrix& a, double sigma) {
    Matrix shifted = a;
    shifted.diagonal().array() -= sigma;
    const Vector d = Eigen::LDLT<Matrix>(shifted).vectorD();
    int count = 0;
    for (int i = 0; i < d.size(); ++i)
        if (d[i] < 0.0) ++count;
    return count;
}

} // namespace detail

/// Smallest eigenvalue of a symmetric matrix by inverse (shifted) power
/// iteration with a deterministic start vector.  Positive definite matrices
/// converge unshifted.  Indefinite ones first converge to the eigenvalue of
/// smallest magnitude, then factorization inertia locates the leftmost one
/// and a shifted iteration just below it polishes the value.
inline EigenEstimate min_eigenvalue(const Matrix& a, double tol = 1e-12,
                                    int max_iter = 10000) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw PreconditionError("min_eigenvalue: matrix must be square and non-empty");
    const int m = static_cast<int>(a.rows());
    if (m == 1) return {a(0, 0), 0};

    const double floor = detail::rayleigh_noise_floor(a);
    SymmetricFactorization base(a);
    int iters = 0;

    // inverse iteration at a fixed shift; returns the converged Rayleigh
    // quotient once the delta stays under max(tol |rho|, noise floor) twice
    auto iterate = [&](std::optional<double> sigma) {
        std::optional<SymmetricFactorization> f;
        if (sigma) {
            Matrix shifted = a;
            shifted.diagonal().array() -= *sigma;
            f.emplace(std::move(shifted));
        }
        Vector x = detail::deterministic_start(m);
        double rho = detail::rayleigh(a, x);
        int streak = 0;
        while (iters < max_iter) {
            Vector y = f ? f->solve_once(x) : base.solve_once(x);
            const double ny = y.norm();
            if (!(ny > 0.0) || !std::isfinite(ny)) {
                x = detail::deterministic_start(m);
                x[iters % m] += 0.5;
                x.normalize();
                ++iters;
                continue;
            }
            x = y / ny;
            const double prev = rho;
            rho = detail::rayleigh(a, x);
            ++iters;
            if (std::abs(rho - prev) <= std::max(tol * std::abs(rho), floor)) {
                if (++streak >= 2) return rho;
            } else {
                streak = 0;
            }
        }
        throw NoConvergenceError("min_eigenvalue: no convergence after " +
                                 std::to_string(max_iter) + " iterations");
    };

    const double rho = iterate(std::nullopt);
    if (base.positive_pivots()) return {rho, iters};

    // anything still below the smallest-magnitude eigenvalue?
    const double probe = rho - std::max(floor, std::abs(rho) * 1e-9);
    if (detail::eigen_count_below(a, probe) == 0) return {rho, iters};

    double lo = detail::gershgorin_lower_bound(a) - floor - 1.0;
    double hi = probe;
    for (int step = 0; step < 64; ++step) {
        if (hi - lo <= std::max(floor, 1e-12 * (std::abs(hi) + std::abs(lo)))) break;
        const double mid = 0.5 * (lo + hi);
        if (detail::eigen_count_below(a, mid) > 0)
            hi = mid;
        else
            lo = mid;
    }
    return {iterate(lo), iters};
}

} // namespace greenslab
