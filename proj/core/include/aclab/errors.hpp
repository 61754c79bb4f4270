#pragma once

#include <stdexcept>
#include <string>

namespace aclab {

// Base class for all errors thrown by this library. Message strings echo the
// offending inputs so a failure can be reproduced from the log alone.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument values: NaN/inf inputs, negative durations, empty ranges.
class domain_error : public error {
 public:
  using error::error;
};

// Parameters violate a regime hypothesis (e.g. |q0| < 1 for BR, or a bound
// requested outside the regime it was proved for).
class hypothesis_error : public error {
 public:
  using error::error;
};

// An exact transition or closed form overflowed double range. Reported, not
// saturated; callers decide whether +inf is an acceptable substitute.
class overflow_error : public error {
 public:
  using error::error;
};

// Malformed simulation grid, or deadline spacing collapsed below resolution.
class grid_error : public error {
 public:
  using error::error;
};

// A strategy produced a non-finite control value.
class strategy_error : public error {
 public:
  using error::error;
};

// Structural violations in serialized configs, blueprints, or logs.
class schema_error : public error {
 public:
  using error::error;
};

// A numerical routine (quadrature, root bracketing) failed to converge.
class numeric_error : public error {
 public:
  using error::error;
};

// Monte Carlo abort. Carries the (seed, path) pair needed to replay the
// failing path deterministically; overflow() distinguishes double-range
// blowups (which sweeps downgrade to flagged +inf rows) from other causes.
class mc_error : public error {
 public:
  mc_error(const std::string& msg, unsigned long long seed, long path,
           bool overflow = false)
      : error(msg + " [replay: seed=" + std::to_string(seed) +
              " path=" + std::to_string(path) + "]"),
        seed_(seed),
        path_(path),
        overflow_(overflow) {}

  unsigned long long seed() const noexcept { return seed_; }
  long path() const noexcept { return path_; }
  bool overflow() const noexcept { return overflow_; }

 private:
  unsigned long long seed_;
  long path_;
  bool overflow_;
};

}  // namespace aclab
