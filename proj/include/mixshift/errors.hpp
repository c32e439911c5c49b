#pragma once

#include <stdexcept>
#include <string>

namespace mixshift {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sample container is empty where at least one draw is required.
struct EmptySampleError : Error {
  using Error::Error;
};

// Fewer observations than the operation needs (e.g. n < 2 for a variance).
struct InsufficientDataError : Error {
  using Error::Error;
};

// Estimator denominator is exactly zero while the numerator is positive.
struct DegenerateInputError : Error {
  using Error::Error;
};

// Population variance formulas need mu_Y > mu_X.
struct UndefinedPopulationError : Error {
  using Error::Error;
};

// Argument outside the mathematical domain (e.g. quantile of p outside (0,1)).
struct DomainError : Error {
  using Error::Error;
};

}  // namespace mixshift
