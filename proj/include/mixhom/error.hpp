#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixhom {

/// Failure categories. The CLI maps each one to its own exit status.
enum class ErrorKind {
  config,         // invalid parameters or configuration records
  alignment,      // partition interfaces do not fall on cell boundaries
  stability,      // time step outside the explicit scheme's bound
  normalization,  // kernel scaling failed
  io,             // unreadable input or unwritable output
  mismatch,       // objects built on different grids / snapshot times
  precondition,   // operation-specific input requirement violated
  diagnostic,     // requested diagnostic needs data that was not retained
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mixhom
