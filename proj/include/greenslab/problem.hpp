#pragma once

#include <functional>
#include <string>

#include "greenslab/grid.hpp"

namespace greenslab {

/// Supported operator families.  Each is a constant-coefficient polyharmonic
/// operator with clamped (homogeneous Dirichlet) boundary conditions plus an
/// optional zero-order potential term.
enum class OperatorFamily {
    SecondOrder1D,  // -u''
    FourthOrder1D,  // u''''            (clamped beam)
    SixthOrder1D,   // -u''''''
    Laplace2D,      // -laplace u
    Biharmonic2D,   // laplace^2 u      (clamped plate)
};

/// Order m of the differential operator.
inline int family_order(OperatorFamily f) {
    switch (f) {
        case OperatorFamily::SecondOrder1D: return 2;
        case OperatorFamily::FourthOrder1D: return 4;
        case OperatorFamily::SixthOrder1D:  return 6;
        case OperatorFamily::Laplace2D:     return 2;
        case OperatorFamily::Biharmonic2D:  return 4;
    }
    return 0;
}

/// Spatial dimension n the family is posed in.
inline int family_dimension(OperatorFamily f) {
    switch (f) {
        case OperatorFamily::SecondOrder1D:
        case OperatorFamily::FourthOrder1D:
        case OperatorFamily::SixthOrder1D:  return 1;
        case OperatorFamily::Laplace2D:
        case OperatorFamily::Biharmonic2D:  return 2;
    }
    return 0;
}

inline std::string family_name(OperatorFamily f) {
    switch (f) {
        case OperatorFamily::SecondOrder1D: return "second-order-1d";
        case OperatorFamily::FourthOrder1D: return "fourth-order-1d";
        case OperatorFamily::SixthOrder1D:  return "sixth-order-1d";
        case OperatorFamily::Laplace2D:     return "laplace-2d";
        case OperatorFamily::Biharmonic2D:  return "biharmonic-2d";
    }
    return "?";
}

inline OperatorFamily parse_family(const std::string& name) {
    if (name == "second-order-1d") return OperatorFamily::SecondOrder1D;
    if (name == "fourth-order-1d") return OperatorFamily::FourthOrder1D;
    if (name == "sixth-order-1d") return OperatorFamily::SixthOrder1D;
    if (name == "laplace-2d") return OperatorFamily::Laplace2D;
    if (name == "biharmonic-2d") return OperatorFamily::Biharmonic2D;
    throw PreconditionError("unknown operator family: '" + name + "'");
}

using Potential = std::function<double(const Point&)>;

/// An operator family on a grid with an optional zero-order potential.
struct ProblemSpec {
    OperatorFamily family = OperatorFamily::SecondOrder1D;
    GridPtr grid;
    Potential potential;  // null means identically zero
};

inline ProblemSpec make_problem(OperatorFamily family, GridPtr grid,
                                Potential potential = nullptr) {
    const int n = family_dimension(family);
    const int m = family_order(family);
    if (!grid) throw PreconditionError("make_problem: null grid");
    if (grid->dimension() != n)
        throw PreconditionError("make_problem: " + family_name(family) + " needs a " +
                                std::to_string(n) + "D grid");
    // standing hypothesis m > n/2; true for the whole menu, asserted anyway
    if (!(2 * m > n))
        throw PreconditionError("make_problem: operator order violates m > n/2");
    ProblemSpec spec;
    spec.family = family;
    spec.grid = std::move(grid);
    spec.potential = std::move(potential);
    return spec;
}

} // namespace greenslab
