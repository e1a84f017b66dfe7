#pragma once

#include <memory>
#include <utility>

#include "greenslab/discretize.hpp"
#include "greenslab/linalg.hpp"

namespace greenslab {

/// Dense kernel matrix K with K(i, j) ~ G(x_i, x_j) and its quadrature
/// context.  K is exactly symmetric; the asymmetry of the raw inverse is
/// recorded before it is discarded.
struct GreensKernel {
    GridPtr grid;
    Weights weights;
    Matrix k;
    double raw_asymmetry = 0.0;    // max|B - B^T| / max|B| of the raw inverse
    double inverse_residual = 0.0; // max|A B - I| achieved by the inversion
    std::shared_ptr<const DiscreteOperator> source;
};

/// max_{i,j} |m_ij - m_ji| / max|m|; zero for an exactly symmetric matrix.
inline double relative_asymmetry(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    const double top = (m - m.transpose()).cwiseAbs().maxCoeff();
    const double scale = m.cwiseAbs().maxCoeff();
    return scale == 0.0 ? 0.0 : top / scale;
}

/// K = A^{-1} W^{-1}.  The weights are a scalar multiple of the identity, so
/// K inherits exact symmetry from the symmetrized inverse and the weighted
/// kernel application reproduces the solver.
inline GreensKernel build_greens_kernel(std::shared_ptr<const DiscreteOperator> op,
                                        double tol_sing = 1e-12) {
    const SymmetricFactorization f = factor_symmetric(op->matrix, tol_sing);
    const InverseResult inv = invert(f);
    GreensKernel kernel;
    kernel.grid = op->grid;
    kernel.weights = quadrature_weights(op->grid);
    kernel.k = inv.inverse / op->grid->cell_volume();
    kernel.raw_asymmetry = inv.presym_max == 0.0 ? 0.0 : inv.presym_defect / inv.presym_max;
    kernel.inverse_residual = inv.residual_max;
    kernel.source = std::move(op);
    return kernel;
}

/// Kernel wrapper around an explicit matrix; used for synthetic kernels.
inline GreensKernel make_synthetic_kernel(GridPtr grid, Matrix k) {
    GreensKernel kernel;
    kernel.grid = grid;
    kernel.weights = quadrature_weights(grid);
    kernel.k = std::move(k);
    kernel.raw_asymmetry = relative_asymmetry(kernel.k);
    return kernel;
}

/// (G f)_i = sum_j K_ij w_j f_j.
inline Field apply_kernel(const GreensKernel& kernel, const Field& f) {
    detail::require_same_grid(*kernel.grid, *f.grid, "apply_kernel");
    Field out;
    out.grid = f.grid;
    out.values = kernel.k * kernel.weights.w.cwiseProduct(f.values);
    return out;
}

/// sqrt(sum_ij w_i w_j K_ij^2), the discrete Hilbert-Schmidt norm.
inline double hs_norm(const GreensKernel& kernel) {
    const Vector& w = kernel.weights.w;
    return std::sqrt(w.dot((kernel.k.array().square().matrix()) * w));
}

} // namespace greenslab
