#pragma once

#include <stdexcept>
#include <string>

namespace hinv {

/// Bad arguments: shapes, ranges, malformed input. Maps to CLI exit code 1.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure: non-finite data, violated stationarity, failed convergence.
/// Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hinv
