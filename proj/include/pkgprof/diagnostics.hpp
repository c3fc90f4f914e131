#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pkgprof {

enum class DiagnosticKind {
  MalformedLine,
  SuspectSample,
  UnreadableList,
  ProbeFailed,
};

const char* to_string(DiagnosticKind kind);

// A non-fatal problem found while reading input. line is 1-based, 0 when the
// problem is not tied to a line.
struct Diagnostic {
  DiagnosticKind kind;
  std::size_t line = 0;
  std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

// Records plus everything that was skipped or flagged on the way.
template <class T>
struct Parsed {
  T value;
  Diagnostics diagnostics;
};

// Fatal I/O problem: missing directory, unreadable file, unwritable sink.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pkgprof
