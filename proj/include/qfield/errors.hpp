#pragma once

#include <stdexcept>
#include <string>

namespace qfield {

class NotHermitian : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidState : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class BadParameter : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when an integral cannot be brought under tolerance. Carries the
// error estimate that was reached so callers can report it.
class QuadratureFailure : public std::runtime_error {
public:
  QuadratureFailure(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

private:
  double achieved_error_;
};

} // namespace qfield
