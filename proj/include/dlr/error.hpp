#pragma once

#include <stdexcept>
#include <string>

namespace dlr {

/// Precondition or domain violation raised by any dlr operation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dlr
