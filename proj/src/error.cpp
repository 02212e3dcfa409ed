#include "dlinpaint/error.hpp"

#include <atomic>
#include <iostream>

namespace dlinpaint {

namespace {

void stderr_sink(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

std::atomic<WarningSink> g_sink{&stderr_sink};

}  // namespace

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::infeasible: return "infeasible";
  }
  return "error";
}

void set_warning_sink(WarningSink sink) { g_sink.store(sink ? sink : &stderr_sink); }

void warn(const std::string& message) { g_sink.load()(message); }

}  // namespace dlinpaint
