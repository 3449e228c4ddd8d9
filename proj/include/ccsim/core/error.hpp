#pragma once

#include <stdexcept>
#include <string>

namespace ccsim {

// Input data cannot be used (malformed header, no events to estimate from, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent configuration (unknown preset, missing skill-set entry, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ccsim
