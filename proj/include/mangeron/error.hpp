#pragma once

#include <stdexcept>
#include <string>

namespace mangeron {

/// Input that violates an operation's precondition (bad node count, breakpoint
/// outside the open interval, off-grid moment point, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A bundle or grid function whose shape does not match its grid.
class StructuralError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Expression or configuration text that cannot be parsed.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Classical boundary data with φ₁(0) ≠ ψ₁(0).
class CornerMismatchError : public std::runtime_error {
public:
    CornerMismatchError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Boundary data that fails the unknown-free compatibility rows.
class DataConstraintError : public std::runtime_error {
public:
    DataConstraintError(const std::string& what, double max_residual)
        : std::runtime_error(what), max_residual_(max_residual) {}
    double max_residual() const noexcept { return max_residual_; }

private:
    double max_residual_;
};

/// Dense factorization found the system numerically singular.
class SingularSystemError : public std::runtime_error {
public:
    SingularSystemError(const std::string& what, double condition_estimate)
        : std::runtime_error(what), condition_estimate_(condition_estimate) {}
    double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

/// No method produced an accepted solution (divergence without a dense
/// fallback, or a residual gate failure).
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mangeron
