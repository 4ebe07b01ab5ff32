#pragma once

#include <stdexcept>
#include <string>

namespace betafluct {

// Base class; every library failure derives from it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the documented domain (bad interval, z off strip, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed user configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A requested accuracy could not be reached; carries the achieved residual.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double achieved)
        : Error(what + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

// Iteration failed to converge.
class ConvergenceError : public AccuracyError {
public:
    using AccuracyError::AccuracyError;
};

// Too little data for a statistic (e.g. effective sample size below threshold).
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// A modelling assumption fails: soft edges, regular support, positive definiteness, ...
class ModelAssumptionError : public Error {
public:
    using Error::Error;
};

// Singular or indefinite system where the model requires a regular one.
class DegeneracyError : public ModelAssumptionError {
public:
    using ModelAssumptionError::ModelAssumptionError;
};

}  // namespace betafluct
