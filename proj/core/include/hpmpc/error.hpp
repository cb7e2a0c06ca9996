#pragma once

#include <stdexcept>
#include <string>

namespace hpmpc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition or invariant violation on an argument (bad dimension,
/// non-finite entry, out-of-domain operating point).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input data is unusable: too short, degenerate, malformed file rows.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Run configuration is inconsistent or references missing files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A fit or optimization could not produce an admissible result.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace hpmpc
