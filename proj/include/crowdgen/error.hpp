#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace crowdgen {

enum class ErrorKind {
  kValidation,     // malformed input or schema violation
  kNotFound,       // unknown handle / session / participant
  kConflict,       // write would break a store invariant
  kUnprocessable,  // well-formed request the engine cannot bind (task/op, kind/op)
  kBackend,        // LLM transport or exhausted retries
  kIo,             // filesystem
};

const char* to_string(ErrorKind kind);

/// Single exception type used across the engine. `details` carries one entry
/// per violation (path-qualified for schema errors).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::vector<std::string> details = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorKind kind_;
  std::vector<std::string> details_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

/// HTTP status for the service layer.
int http_status(ErrorKind kind);

/// Process exit code for the CLI: 2 validation, 3 backend, 4 I/O.
int exit_code(ErrorKind kind);

}  // namespace crowdgen
