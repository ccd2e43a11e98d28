#pragma once

#include <stdexcept>
#include <string>

namespace pdopt {

/// A domain invariant was violated. `field()` names the offending input,
/// `rule()` the constraint it broke.
class InvariantViolation : public std::invalid_argument {
 public:
  InvariantViolation(std::string field, std::string rule)
      : std::invalid_argument(field + ": " + rule),
        field_(std::move(field)),
        rule_(std::move(rule)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& rule() const noexcept { return rule_; }

 private:
  std::string field_;
  std::string rule_;
};

/// Power iteration and the dense fallback could not produce a Perron pair
/// that passes the residual checks.
class DegenerateSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maximum investment cannot reach the requested feasibility index.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No scale factor brings the generalized WTM to spectral radius one.
class Uncalibratable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file is not valid JSON or not the expected shape.
class MalformedFile : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pdopt
