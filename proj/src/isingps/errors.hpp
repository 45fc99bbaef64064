#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace isingps {

// Input exceeds a hard resource cap (dense state size, enumeration size, ...).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed model or configuration input. Messages carry "<source>:<line>:"
// where a location is known.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A stochastic trajectory left the finite domain.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(double tau, std::int64_t trajectory = -1);

  double tau() const noexcept { return tau_; }
  std::int64_t trajectory() const noexcept { return trajectory_; }
  void set_trajectory(std::int64_t trajectory);

  const char* what() const noexcept override { return message_.c_str(); }

 private:
  void rebuild_message();

  double tau_;
  std::int64_t trajectory_;
  std::string message_;
};

// Ratio estimator whose denominator mean is indistinguishable from zero.
class DegenerateRatioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace isingps
