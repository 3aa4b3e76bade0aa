#pragma once

#include <stdexcept>
#include <string>

namespace vacflow {

/// Input rejected before any time stepping (bad grid size, invalid profile,
/// inconsistent config). Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulation left the admissible regime mid-run (J <= 0, non-finite state).
/// Maps to CLI exit code 2.
class AbortError : public std::runtime_error {
 public:
  AbortError(double time, const std::string& what)
      : std::runtime_error(what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace vacflow
