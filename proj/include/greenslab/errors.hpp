#pragma once

#include <stdexcept>
#include <string>

namespace greenslab {

/// Factorization hit a pivot below the singularity tolerance.
class SingularError : public std::runtime_error {
public:
    explicit SingularError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative eigenvalue scheme exceeded its iteration cap.
class NoConvergenceError : public std::runtime_error {
public:
    explicit NoConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Two objects that must live on the same grid do not.
class GridMismatchError : public std::invalid_argument {
public:
    explicit GridMismatchError(const std::string& what) : std::invalid_argument(what) {}
};

/// A caller violated a documented precondition.
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// The witness construction failed even in its degenerate fallback.
/// Reaching this contradicts the row-mass identity and means a bug.
class WitnessConstructionError : public std::logic_error {
public:
    explicit WitnessConstructionError(const std::string& what) : std::logic_error(what) {}
};

} // namespace greenslab
