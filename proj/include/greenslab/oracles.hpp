#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "greenslab/discretize.hpp"
#include "greenslab/linalg.hpp"

namespace greenslab {

namespace detail {

inline void require_unit_range(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
        throw PreconditionError(std::string("oracle argument ") + name + " outside [0,1]");
}

} // namespace detail

/// Kernel of -u'' on [0,1] with u(0) = u(1) = 0.
inline double exact_greens_second_order(double x, double xi) {
    detail::require_unit_range(x, "x");
    detail::require_unit_range(xi, "xi");
    return x <= xi ? x * (1.0 - xi) : xi * (1.0 - x);
}

/// Coefficients of the two cubics composing the clamped-clamped beam kernel
/// at load point xi: value, slope and curvature match at xi and the third
/// derivative jumps by one.
inline std::array<double, 8> beam_kernel_cubics(double xi) {
    detail::require_unit_range(xi, "xi");
    Eigen::Matrix<double, 8, 8> m = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 1> rhs = Eigen::Matrix<double, 8, 1>::Zero();
    const double s = xi, s2 = xi * xi, s3 = xi * xi * xi;
    m(0, 0) = 1.0;                                           // p(0) = 0
    m(1, 1) = 1.0;                                           // p'(0) = 0
    m.block<1, 4>(2, 4) << 1.0, 1.0, 1.0, 1.0;               // q(1) = 0
    m.block<1, 4>(3, 4) << 0.0, 1.0, 2.0, 3.0;               // q'(1) = 0
    m.block<1, 4>(4, 0) << 1.0, s, s2, s3;                   // p(xi) = q(xi)
    m.block<1, 4>(4, 4) << -1.0, -s, -s2, -s3;
    m.block<1, 4>(5, 0) << 0.0, 1.0, 2.0 * s, 3.0 * s2;      // p'(xi) = q'(xi)
    m.block<1, 4>(5, 4) << 0.0, -1.0, -2.0 * s, -3.0 * s2;
    m.block<1, 4>(6, 0) << 0.0, 0.0, 2.0, 6.0 * s;           // p''(xi) = q''(xi)
    m.block<1, 4>(6, 4) << 0.0, 0.0, -2.0, -6.0 * s;
    m(7, 3) = -6.0;                                          // q''' - p''' = 1
    m(7, 7) = 6.0;
    rhs(7) = 1.0;
    const Eigen::Matrix<double, 8, 1> c = m.partialPivLu().solve(rhs);
    std::array<double, 8> out;
    for (int i = 0; i < 8; ++i) out[i] = c[i];
    return out;
}

inline double eval_beam_cubics(const std::array<double, 8>& c, double x, double xi) {
    const int base = x <= xi ? 0 : 4;
    return c[base] + x * (c[base + 1] + x * (c[base + 2] + x * c[base + 3]));
}

/// Kernel of u'''' on [0,1] with clamped ends u = u' = 0, evaluated through
/// the piecewise-cubic matching system rather than a closed form.
inline double exact_greens_beam(double x, double xi) {
    detail::require_unit_range(x, "x");
    return eval_beam_cubics(beam_kernel_cubics(xi), x, xi);
}

struct EigenExpansion {
    Matrix kernel;       // sum_k phi_k phi_k^T / lambda_k, kernel-normalized
    Vector eigenvalues;  // ascending
    Matrix eigenvectors; // unit 2-norm columns
};

/// Truncated spectral expansion of the Green's kernel from the k_max smallest
/// eigenpairs, computed by deflated inverse iteration with Rayleigh-quotient
/// restarts.  Independent route to the same kernel as build_greens_kernel.
inline EigenExpansion eigen_expansion_kernel(const DiscreteOperator& op, int k_max,
                                             double tol = 1e-11, int max_iter = 10000) {
    const Matrix& a = op.matrix;
    const int m = static_cast<int>(a.rows());
    if (k_max < 1 || k_max > m)
        throw PreconditionError("eigen_expansion_kernel: k_max out of range");
    SymmetricFactorization base(a);
    if (!base.positive_pivots())
        throw PreconditionError("eigen_expansion_kernel: operator must be positive definite");
    const double scale = base.scale();
    const double floor = detail::rayleigh_noise_floor(a);

    Matrix phis(m, k_max);
    Vector lambdas(k_max);
    for (int k = 0; k < k_max; ++k) {
        Vector x = detail::deterministic_start(m);
        x[k % m] += 0.25;  // vary the start across pairs
        x.normalize();
        auto deflate = [&](Vector& v) {
            for (int j = 0; j < k; ++j) v -= phis.col(j).dot(v) * phis.col(j);
        };
        deflate(x);
        if (x.norm() == 0.0) x = Vector::Unit(m, k % m);
        x.normalize();

        double rho = detail::rayleigh(a, x);
        std::optional<SymmetricFactorization> shifted;  // lazily built on restart
        int iters = 0, since_restart = 0;
        bool converged = false;
        while (iters < max_iter) {
            Vector y = shifted ? shifted->solve_once(x) : base.solve_once(x);
            deflate(y);
            const double ny = y.norm();
            if (!(ny > 0.0) || !std::isfinite(ny)) {
                x = Vector::Unit(m, (k + iters) % m);
                deflate(x);
                x.normalize();
                ++iters;
                continue;
            }
            x = y / ny;
            const double rho_prev = rho;
            rho = detail::rayleigh(a, x);
            ++iters;
            ++since_restart;
            const double resid = (a * x - rho * x).norm();
            if (std::abs(rho - rho_prev) <= std::max(tol * std::abs(rho), floor) &&
                resid <= 1e-12 * scale) {
                converged = true;
                break;
            }
            if (since_restart >= 30) {
                Matrix s = a;
                s.diagonal().array() -= rho;
                shifted.emplace(std::move(s));
                since_restart = 0;
            }
        }
        if (!converged)
            throw NoConvergenceError("eigen_expansion_kernel: pair " + std::to_string(k) +
                                     " did not converge");
        phis.col(k) = x;
        lambdas[k] = rho;
    }

    // ascending order; the deflation already finds them roughly smallest-first
    std::vector<int> order(k_max);
    for (int i = 0; i < k_max; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return lambdas[i] < lambdas[j]; });

    EigenExpansion out;
    out.eigenvalues.resize(k_max);
    out.eigenvectors.resize(m, k_max);
    out.kernel = Matrix::Zero(m, m);
    for (int i = 0; i < k_max; ++i) {
        out.eigenvalues[i] = lambdas[order[i]];
        out.eigenvectors.col(i) = phis.col(order[i]);
        out.kernel += out.eigenvectors.col(i) * out.eigenvectors.col(i).transpose() /
                      out.eigenvalues[i];
    }
    out.kernel /= op.grid->cell_volume();
    return out;
}

} // namespace greenslab
