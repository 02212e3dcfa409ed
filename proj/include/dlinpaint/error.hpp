#pragma once

#include <stdexcept>
#include <string>

namespace dlinpaint {

/// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  invalid_argument,  // caller violated a documented precondition
  io,                // file could not be opened, read or written
  parse,             // file contents are malformed
  validation,        // mesh violates manifold/orientation/triangle requirements
  infeasible,        // pipeline cannot proceed (unreachable patch, degenerate data)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

// Non-fatal diagnostics (dropped attributes, clamped cotangents, ...).
// The default sink writes "warning: <msg>" to stderr.
using WarningSink = void (*)(const std::string&);
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace dlinpaint
