#pragma once

#include <stdexcept>
#include <string>

namespace binsmooth {

/// Bad user-supplied configuration (flags, orders, column names). CLI exit 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unusable input data (missing file, empty sample, parse failure). CLI exit 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure (singular fit, indefinite variance, degenerate selection). CLI exit 4.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Evaluation point outside the support of the fitted partition.
class EvaluationError : public NumericError {
public:
    explicit EvaluationError(const std::string& msg) : NumericError(msg) {}
};

} // namespace binsmooth
