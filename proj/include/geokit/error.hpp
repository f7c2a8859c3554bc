#pragma once

#include <stdexcept>
#include <string>

namespace geokit {

/// Base of every exception thrown by the library. Callers that only care about
/// "bad input vs. everything else" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument values that violate an operation's precondition (shape mismatch,
/// empty group, non-finite feature...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace geokit
