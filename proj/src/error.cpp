#include "mixhom/error.hpp"

namespace mixhom {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::stability: return "stability";
    case ErrorKind::normalization: return "normalization";
    case ErrorKind::io: return "io";
    case ErrorKind::mismatch: return "mismatch";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::diagnostic: return "diagnostic";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace mixhom
