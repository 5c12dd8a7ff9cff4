#pragma once

#include <stdexcept>
#include <string>

namespace netrefine {

// Base of every error raised by the library. The subclasses map onto the
// command-line exit codes (see tools/cli.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rasters that must share a grid do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A pixel lies outside its grid.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// A tuning parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input data violates a precondition (seed not on the network, NaN
// likelihood, terminal not traversable, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// File could not be opened, read, written or parsed.
class FormatError : public Error {
 public:
  using Error::Error;
};

// The likelihood provider failed to produce a raster.
class ProviderError : public Error {
 public:
  using Error::Error;
};

}  // namespace netrefine
