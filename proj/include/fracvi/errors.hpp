#pragma once

#include <stdexcept>
#include <string>

namespace fracvi {

/// Parameter outside its mathematical domain (alpha not in (0, 1], t outside [0, 1], ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed call: mismatched dimensions, index ranges, unknown names.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition of the operation does not hold
/// (contraction condition, boundary values).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Input data for which the requested quantity is undefined (e.g. zero errors in a log fit).
class DegenerateDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative method ran out of iterations.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, int index, double last_residual)
        : std::runtime_error(what), index_(index), last_residual_(last_residual) {}

    /// Step index (inner solvers) or outer iteration count (sweep) where it gave up.
    int index() const noexcept { return index_; }
    double last_residual() const noexcept { return last_residual_; }

private:
    int index_;
    double last_residual_;
};

/// The nodewise control update failed at a given time node.
class ControlUpdateError : public std::runtime_error {
public:
    ControlUpdateError(const std::string& what, int node)
        : std::runtime_error(what), node_(node) {}

    int node() const noexcept { return node_; }

private:
    int node_;
};

}  // namespace fracvi
