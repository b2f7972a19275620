#include "crowdgen/error.hpp"

#include <utility>

namespace crowdgen {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kConflict: return "conflict";
    case ErrorKind::kUnprocessable: return "unprocessable";
    case ErrorKind::kBackend: return "backend";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::vector<std::string> details)
    : std::runtime_error(message), kind_(kind), details_(std::move(details)) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return 400;
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kConflict: return 409;
    case ErrorKind::kUnprocessable: return 422;
    case ErrorKind::kBackend: return 502;
    case ErrorKind::kIo: return 500;
  }
  return 500;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kBackend: return 3;
    case ErrorKind::kIo: return 4;
    default: return 2;
  }
}

}  // namespace crowdgen
