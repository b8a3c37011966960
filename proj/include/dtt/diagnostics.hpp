#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dtt {

struct Span {
  int line = 0;  // 1-based; 0 means "no location"
  int col = 0;
};

struct Diagnostic {
  enum class Severity { Error, Warning, Note };
  Severity severity = Severity::Error;
  Span span;
  std::string message;
  std::string expected;  // optional expected/actual classifier pair
  std::string actual;

  std::string render() const {
    std::ostringstream os;
    switch (severity) {
      case Severity::Error: os << "error"; break;
      case Severity::Warning: os << "warning"; break;
      case Severity::Note: os << "note"; break;
    }
    if (span.line > 0) os << " at " << span.line << ":" << span.col;
    os << ": " << message;
    if (!expected.empty()) os << " (expected " << expected << ", got " << actual << ")";
    return os.str();
  }
};

struct CheckError {
  Diagnostic diag;
};

inline CheckError checkError(std::string msg, Span sp = {}) {
  return CheckError{Diagnostic{Diagnostic::Severity::Error, sp, std::move(msg), "", ""}};
}

inline CheckError checkErrorTyped(std::string msg, std::string expected, std::string actual, Span sp = {}) {
  return CheckError{Diagnostic{Diagnostic::Severity::Error, sp, std::move(msg), std::move(expected), std::move(actual)}};
}

}  // namespace dtt
