#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <utility>

namespace scalestat {

// Configuration / input-file problems. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failures (singular systems, solver breakdown). CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Weighted design matrix lost full column rank.
class SingularDesignError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Iterative solver hit its iteration cap; carries the last iterate so the
// caller can inspect or reuse it.
class NonConvergenceError : public NumericalError {
public:
    NonConvergenceError(const std::string& what, Eigen::VectorXd iterate)
        : NumericalError(what), iterate_(std::move(iterate)) {}

    const Eigen::VectorXd& iterate() const { return iterate_; }

private:
    Eigen::VectorXd iterate_;
};

// A metric is undefined for the given inputs (e.g. zero-width reference
// interval in a relative error).
class UndefinedMetricError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// An exact operation would require enumerating more vertices than the
// configured budget allows; the caller should switch to a relaxation.
class InfeasibleScaleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace scalestat
