#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sockpuppet {

/// Malformed or inconsistent input data (CLI exit code 1).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters such as d >= b or a threshold outside [0, 1] (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sockpuppet
