#pragma once

#include <stdexcept>
#include <string>

namespace artpipe {

enum class ErrorCode {
  InvalidArgument = 1,
  Io = 2,
  Format = 3,
  Data = 4,
  Convergence = 5,
  Internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the SVM solver when the iteration cap is hit before the KKT
// violation drops below tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double violation)
      : Error(ErrorCode::Convergence, what), violation_(violation) {}
  double violation() const noexcept { return violation_; }

 private:
  double violation_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace artpipe
