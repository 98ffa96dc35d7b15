#pragma once

#include <stdexcept>
#include <string>

namespace grasscap {

// Shape or size preconditions violated (k > n, mismatched vector lengths, ...).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Scalar argument outside its mathematical domain (sigma2 <= 0, kappa >= 1, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A requested count does not fit in a 64-bit integer.
struct OverflowError : std::overflow_error {
  using std::overflow_error::overflow_error;
};

// Cholesky (or similar) factorization failed; matrix not positive definite.
struct FactorizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Too few usable samples or rows to produce the requested statistic.
struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file (PGM header, config file, ...); message carries
// the path and, where applicable, the line number.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace grasscap
