#pragma once

#include <stdexcept>
#include <string>

namespace tirever {

/// Bad input: malformed files, invalid parameters, series too short.
class DataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Estimation could not produce a usable result (all starts infeasible,
/// degenerate variance, singular regressors).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tirever
