#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "greenslab/errors.hpp"

namespace greenslab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
};

/// Uniform grid of interior nodes on an interval or an axis-aligned
/// rectangle.  Boundary nodes are eliminated: homogeneous Dirichlet data is
/// encoded by their absence.  Node ordering is lexicographic in (x, y),
/// x-major in 2D, and never changes after construction.
class Grid {
public:
    int dimension() const { return dim_; }
    const Interval& bounds(int axis) const { return bounds_[axis]; }
    int count(int axis) const { return counts_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }

    /// Total number of interior unknowns.
    int size() const { return static_cast<int>(nodes_.size()); }
    const Point& node(int i) const { return nodes_[i]; }
    const std::vector<Point>& nodes() const { return nodes_; }

    /// Product of the per-axis spacings: the volume of one grid cell.
    double cell_volume() const {
        return dim_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1];
    }

    /// Flat index of the 2D node (ix, iy); x is the major axis.
    int index2d(int ix, int iy) const { return ix * counts_[1] + iy; }

    bool same_layout(const Grid& other) const {
        if (dim_ != other.dim_) return false;
        for (int a = 0; a < dim_; ++a) {
            if (counts_[a] != other.counts_[a]) return false;
            if (bounds_[a].lo != other.bounds_[a].lo) return false;
            if (bounds_[a].hi != other.bounds_[a].hi) return false;
        }
        return true;
    }

    friend std::shared_ptr<const Grid> make_grid(Interval xb, int nx);
    friend std::shared_ptr<const Grid> make_grid(Interval xb, int nx,
                                                 Interval yb, int ny);

private:
    Grid() = default;

    int dim_ = 1;
    Interval bounds_[2];
    int counts_[2] = {0, 0};
    double spacing_[2] = {0.0, 0.0};
    std::vector<Point> nodes_;
};

using GridPtr = std::shared_ptr<const Grid>;

namespace detail {

inline void check_axis(const Interval& b, int n, const char* axis) {
    if (!(b.hi > b.lo))
        throw PreconditionError(std::string("grid bounds inverted or degenerate on axis ") + axis);
    if (n < 3)
        throw PreconditionError(std::string("grid needs at least 3 interior nodes per axis, got ") +
                                std::to_string(n) + " on axis " + axis);
}

} // namespace detail

/// Interior nodes x_i = a + i h, i = 1..n, with h = (b-a)/(n+1).
inline GridPtr make_grid(Interval xb, int nx) {
    detail::check_axis(xb, nx, "x");
    auto g = std::shared_ptr<Grid>(new Grid());
    g->dim_ = 1;
    g->bounds_[0] = xb;
    g->counts_[0] = nx;
    g->spacing_[0] = xb.length() / (nx + 1);
    g->nodes_.reserve(nx);
    for (int i = 1; i <= nx; ++i)
        g->nodes_.push_back({xb.lo + i * g->spacing_[0], 0.0});
    return g;
}

inline GridPtr make_grid(Interval xb, int nx, Interval yb, int ny) {
    detail::check_axis(xb, nx, "x");
    detail::check_axis(yb, ny, "y");
    auto g = std::shared_ptr<Grid>(new Grid());
    g->dim_ = 2;
    g->bounds_[0] = xb;
    g->bounds_[1] = yb;
    g->counts_[0] = nx;
    g->counts_[1] = ny;
    g->spacing_[0] = xb.length() / (nx + 1);
    g->spacing_[1] = yb.length() / (ny + 1);
    g->nodes_.reserve(static_cast<std::size_t>(nx) * ny);
    for (int ix = 1; ix <= nx; ++ix)
        for (int iy = 1; iy <= ny; ++iy)
            g->nodes_.push_back({xb.lo + ix * g->spacing_[0], yb.lo + iy * g->spacing_[1]});
    return g;
}

/// Quadrature weights for integrals over the domain.  Uniform product rule:
/// every interior node carries one cell volume, so the weight matrix is a
/// scalar multiple of the identity and sum(w) <= volume.
struct Weights {
    GridPtr grid;
    Vector w;
};

inline Weights quadrature_weights(const GridPtr& grid) {
    Weights out;
    out.grid = grid;
    out.w = Vector::Constant(grid->size(), grid->cell_volume());
    return out;
}

/// A grid function: one value per interior node.
struct Field {
    GridPtr grid;
    Vector values;
};

namespace detail {

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!a.same_layout(b))
        throw GridMismatchError(std::string(where) + ": operands live on different grids");
}

} // namespace detail

template <typename F>
Field sample_field(const GridPtr& grid, F&& f) {
    Field out;
    out.grid = grid;
    out.values.resize(grid->size());
    for (int i = 0; i < grid->size(); ++i) {
        const double v = f(grid->node(i));
        if (!std::isfinite(v))
            throw PreconditionError("sample_field: non-finite value at node " + std::to_string(i));
        out.values[i] = v;
    }
    return out;
}

inline Field constant_field(const GridPtr& grid, double value) {
    return sample_field(grid, [value](const Point&) { return value; });
}

/// Discrete integral sum_i w_i v_i.  Plain ascending accumulation so the sum
/// matches the matrix-vector reduction order exactly; the single-node load
/// identity in the witness construction relies on this.
inline double integrate(const Field& f, const Weights& w) {
    detail::require_same_grid(*f.grid, *w.grid, "integrate");
    double acc = 0.0;
    for (int i = 0; i < f.values.size(); ++i) acc += w.w[i] * f.values[i];
    return acc;
}

} // namespace greenslab
