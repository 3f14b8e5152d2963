#pragma once

#include <stdexcept>
#include <string>

namespace percap {

// Invalid or inconsistent experiment configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// An estimator could not produce a usable answer at the requested sample
// size: all denominator replicas missed, too few accepted samples, or a
// calibration bracket without a sign change (CLI exit code 3).
struct UnderpoweredError : std::runtime_error {
  explicit UnderpoweredError(const std::string& m) : std::runtime_error(m) {}
};

struct BracketError : UnderpoweredError {
  explicit BracketError(const std::string& m) : UnderpoweredError(m) {}
};

}  // namespace percap
