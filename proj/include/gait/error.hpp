#pragma once

#include <stdexcept>
#include <string>

namespace gait {

/// Error categories map one-to-one onto the CLI exit codes.
enum class ErrorKind {
  InvalidInput = 1,
  Calibration = 2,
  Invariant = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& what) {
  throw Error(ErrorKind::InvalidInput, what);
}

[[noreturn]] inline void fail_calibration(const std::string& what) {
  throw Error(ErrorKind::Calibration, what);
}

[[noreturn]] inline void fail_invariant(const std::string& what) {
  throw Error(ErrorKind::Invariant, what);
}

}  // namespace gait
