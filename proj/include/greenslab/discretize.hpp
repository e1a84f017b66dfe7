#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>

#include "greenslab/linalg.hpp"
#include "greenslab/problem.hpp"

namespace greenslab {

/// Symmetric finite-difference matrix on the interior unknowns of a grid.
/// Assembly is symmetric by construction; nothing is symmetrized afterwards.
struct DiscreteOperator {
    Matrix matrix;
    GridPtr grid;
    std::optional<ProblemSpec> spec;  // absent for synthetic operators
};

namespace detail {

// -u'' : three-point stencil, Dirichlet ends.
inline Matrix second_difference_1d(int n, double h) {
    Matrix a = Matrix::Zero(n, n);
    const double s = 1.0 / (h * h);
    for (int i = 0; i < n; ++i) {
        a(i, i) = 2.0 * s;
        if (i > 0) a(i, i - 1) = -s;
        if (i + 1 < n) a(i, i + 1) = -s;
    }
    return a;
}

// u'''' : five-point stencil with clamped ends u = u' = 0.  The ghost value
// u_{-1} = u_1 folds into the first row, raising its diagonal to 7/h^4.
inline Matrix fourth_difference_1d(int n, double h) {
    static const double c[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
    Matrix a = Matrix::Zero(n, n);
    const double s = 1.0 / (h * h * h * h);
    for (int i = 0; i < n; ++i)
        for (int d = -2; d <= 2; ++d) {
            const int j = i + d;
            if (j >= 0 && j < n) a(i, j) += c[d + 2] * s;
        }
    a(0, 0) += s;
    a(n - 1, n - 1) += s;
    return a;
}

// -u'''''' : seven-point stencil with clamped ends u = u' = u'' = 0.
// Plain sign reflections cannot impose all three end conditions and keep the
// fold symmetric, so the two ghost values are eliminated through
//   u_{-1} = -(1+8t) u_1 + t u_2,   u_{-2} = 16t u_1 - (1+2t) u_2,
// the one-parameter family that is simultaneously symmetric and second-order
// consistent with the clamped conditions.  t = -1/4 keeps the matrix positive
// definite; the convergence study against the exact unit-load solution lives
// in the discretization tests.
inline Matrix sixth_difference_1d(int n, double h) {
    static const double c[7] = {-1.0, 6.0, -15.0, 20.0, -15.0, 6.0, -1.0};
    constexpr double t = -0.25;
    constexpr double fold00 = -6.0 - 64.0 * t;
    constexpr double fold01 = 1.0 + 8.0 * t;
    constexpr double fold11 = -t;
    Matrix a = Matrix::Zero(n, n);
    const double h2 = h * h;
    const double s = 1.0 / (h2 * h2 * h2);
    for (int i = 0; i < n; ++i)
        for (int d = -3; d <= 3; ++d) {
            const int j = i + d;
            if (j >= 0 && j < n) a(i, j) += c[d + 3] * s;
        }
    a(0, 0) += fold00 * s;
    a(0, 1) += fold01 * s;
    a(1, 0) += fold01 * s;
    a(1, 1) += fold11 * s;
    a(n - 1, n - 1) += fold00 * s;
    a(n - 1, n - 2) += fold01 * s;
    a(n - 2, n - 1) += fold01 * s;
    a(n - 2, n - 2) += fold11 * s;
    return a;
}

inline void require_counts(const Grid& g, int per_axis, const std::string& family) {
    for (int ax = 0; ax < g.dimension(); ++ax)
        if (g.count(ax) < per_axis)
            throw PreconditionError(family + " needs at least " + std::to_string(per_axis) +
                                    " interior nodes per axis, got " +
                                    std::to_string(g.count(ax)));
}

} // namespace detail

/// Assemble the symmetric operator matrix for a problem.  The potential adds
/// diag(c(node_i)).
inline DiscreteOperator discretize(const ProblemSpec& spec) {
    const Grid& g = *spec.grid;
    Matrix a;
    switch (spec.family) {
        case OperatorFamily::SecondOrder1D:
            detail::require_counts(g, 3, "second-order-1d");
            a = detail::second_difference_1d(g.count(0), g.spacing(0));
            break;
        case OperatorFamily::FourthOrder1D:
            detail::require_counts(g, 5, "fourth-order-1d");
            a = detail::fourth_difference_1d(g.count(0), g.spacing(0));
            break;
        case OperatorFamily::SixthOrder1D:
            detail::require_counts(g, 7, "sixth-order-1d");
            a = detail::sixth_difference_1d(g.count(0), g.spacing(0));
            break;
        case OperatorFamily::Laplace2D: {
            detail::require_counts(g, 3, "laplace-2d");
            const Matrix lx = detail::second_difference_1d(g.count(0), g.spacing(0));
            const Matrix ly = detail::second_difference_1d(g.count(1), g.spacing(1));
            const Matrix ix = Matrix::Identity(g.count(0), g.count(0));
            const Matrix iy = Matrix::Identity(g.count(1), g.count(1));
            a = Eigen::kroneckerProduct(lx, iy) + Eigen::kroneckerProduct(ix, ly);
            break;
        }
        case OperatorFamily::Biharmonic2D: {
            // 13-point stencil: d4x + d4y + 2 d2x d2y, clamped edges.
            detail::require_counts(g, 5, "biharmonic-2d");
            const Matrix bx = detail::fourth_difference_1d(g.count(0), g.spacing(0));
            const Matrix by = detail::fourth_difference_1d(g.count(1), g.spacing(1));
            const Matrix lx = detail::second_difference_1d(g.count(0), g.spacing(0));
            const Matrix ly = detail::second_difference_1d(g.count(1), g.spacing(1));
            const Matrix ix = Matrix::Identity(g.count(0), g.count(0));
            const Matrix iy = Matrix::Identity(g.count(1), g.count(1));
            a = Eigen::kroneckerProduct(bx, iy) + Eigen::kroneckerProduct(ix, by) +
                2.0 * Eigen::kroneckerProduct(lx, ly);
            break;
        }
    }
    if (spec.potential) {
        for (int i = 0; i < g.size(); ++i) {
            const double c = spec.potential(g.node(i));
            if (!std::isfinite(c))
                throw PreconditionError("discretize: non-finite potential at node " +
                                        std::to_string(i));
            a(i, i) += c;
        }
    }
    DiscreteOperator op;
    op.matrix = std::move(a);
    op.grid = spec.grid;
    op.spec = spec;
    return op;
}

/// Matrix-vector product A f on the operator's grid.
inline Field apply_operator(const DiscreteOperator& op, const Field& f) {
    detail::require_same_grid(*op.grid, *f.grid, "apply_operator");
    Field out;
    out.grid = f.grid;
    out.values = op.matrix * f.values;
    return out;
}

struct AdmissibilityReport {
    double symmetry_defect = 0.0;  // max|A - A^T|, zero by construction
    double smallest_pivot = 0.0;
    double matrix_scale = 0.0;     // max|A|
    bool invertible = false;
    bool admissible = false;
};

/// Discrete admissibility: exact symmetry (self-adjointness) and a
/// factorization whose smallest pivot clears tol_sing * max|A|.
/// Failures are reported, never thrown.
inline AdmissibilityReport admissibility_check(const DiscreteOperator& op,
                                               double tol_sym = 0.0,
                                               double tol_sing = 1e-12) {
    AdmissibilityReport rep;
    rep.symmetry_defect = op.matrix.size() == 0
                              ? 0.0
                              : (op.matrix - op.matrix.transpose()).cwiseAbs().maxCoeff();
    const SymmetricFactorization f{Matrix(op.matrix)};
    rep.smallest_pivot = f.smallest_pivot();
    rep.matrix_scale = f.scale();
    rep.invertible = !f.is_singular(tol_sing);
    rep.admissible = rep.symmetry_defect <= tol_sym && rep.invertible;
    return rep;
}

} // namespace greenslab
