#pragma once

#include <stdexcept>
#include <string>

namespace wnn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Raised when the band eigengap delta_c vanishes and the transfer bound diverges.
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

/// Raised when no eigenvalue of the induced spectrum reaches the band threshold.
class EmptyBand : public Error {
 public:
  using Error::Error;
};

/// Raised when a bound needs a Lipschitz constant the graphon or signal does not have.
class NotLipschitz : public Error {
 public:
  using Error::Error;
};

class Divergence : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace detail
}  // namespace wnn
