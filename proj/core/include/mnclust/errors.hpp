#pragma once

#include <stdexcept>
#include <string>

namespace mnclust {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A matrix required to be SPD failed its Cholesky factorization.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct NotSymmetric : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct DuplicateId : Error {
  using Error::Error;
};

struct UnknownId : Error {
  using Error::Error;
};

struct MissingId : Error {
  using Error::Error;
};

struct EmptyClusterResult : Error {
  using Error::Error;
};

struct InvalidDistanceMatrix : Error {
  using Error::Error;
};

struct KOutOfRange : Error {
  using Error::Error;
};

struct QuadratureNonConvergence : Error {
  using Error::Error;
};

struct InsufficientSurvivors : Error {
  using Error::Error;
};

/// Invalid configuration or malformed input file.
struct ConfigError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace mnclust
