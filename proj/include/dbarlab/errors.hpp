#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dbarlab {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad parameters, unknown catalog entries, invalid weights or geometry.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Field/operator mismatch: wrong grid, wrong degree, wrong length.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Input that should be Hermitian, finite, ... but is not (beyond tolerance).
class NumericalConsistencyError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation is violated by the data.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Manufactured data touches the grid margin or is otherwise unusable.
class DataGenerationError : public Error {
public:
    using Error::Error;
};

/// Iterative solve failed. Carries the residual history and, for staged
/// procedures, the name of the stage that failed.
class SolverError : public Error {
public:
    SolverError(std::string what, std::vector<double> history, std::string stage = {})
        : Error(std::move(what)), history_(std::move(history)), stage_(std::move(stage)) {}

    const std::vector<double>& residual_history() const noexcept { return history_; }
    const std::string& stage() const noexcept { return stage_; }

private:
    std::vector<double> history_;
    std::string stage_;
};

/// Too few usable points to fit a decay rate.
class DegenerateFitError : public Error {
public:
    using Error::Error;
};

/// The dense reference solver could not produce a trustworthy answer.
class OracleError : public Error {
public:
    using Error::Error;
};

}  // namespace dbarlab
