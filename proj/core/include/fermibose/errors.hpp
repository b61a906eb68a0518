#pragma once

#include <stdexcept>
#include <string>

namespace fermibose {

/// Invalid physical or numerical configuration (box too small, bad field, ...).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numerical kernel failed to reach its accuracy target.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace fermibose
