#pragma once

#include <stdexcept>
#include <string>

namespace morsegpe {

// Failure categories. The CLI maps each one onto a distinct exit status.
enum class ErrorKind {
  InvalidArgument,
  NoBoundState,
  NonConvergence,
  BracketFailure,
  NoThreshold,
  WidthCollapse,
  StepUnderflow,
  Indeterminate,
  GridTooNarrow,
  NormDrift,
  BoundaryLeak,
  UnboundDrift,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace morsegpe
