#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace aklab {

// Argument outside the mathematical domain of an operation (t < 0, Im z <= 0, det P != 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A stated precondition on field data does not hold (e.g. vector field not symplectic).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Iterative method failed; carries the last residual and, when available, its history.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual, std::vector<double> history = {})
        : std::runtime_error(what), residual_(residual), history_(std::move(history)) {}
    double residual() const { return residual_; }
    const std::vector<double>& history() const { return history_; }

private:
    double residual_;
    std::vector<double> history_;
};

}  // namespace aklab
