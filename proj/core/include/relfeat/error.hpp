#pragma once

#include <stdexcept>
#include <string>

namespace relfeat {

/// Machine-parsable error codes surfaced by the CLI as `error: <code>: <msg>`.
enum class ErrorCode {
  Io,
  Schema,
  Dimension,
  Config,
  Data,
  Degenerate,
  Internal,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::Schema: return "E_SCHEMA";
    case ErrorCode::Dimension: return "E_DIM";
    case ErrorCode::Config: return "E_CONFIG";
    case ErrorCode::Data: return "E_DATA";
    case ErrorCode::Degenerate: return "E_DEGENERATE";
    case ErrorCode::Internal: return "E_INTERNAL";
  }
  return "E_INTERNAL";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

/// Internal invariant check. Violations indicate a bug, not bad input.
inline void check_internal(bool cond, const char* what) {
  if (!cond) throw std::logic_error(std::string("invariant violated: ") + what);
}

}  // namespace relfeat
