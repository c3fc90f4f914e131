#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pkgprof/ingest.hpp"

namespace pkgprof {

class ProcessListUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SourceUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Snapshot of the processes visible right now.
class ProcessSource {
 public:
  virtual ~ProcessSource() = default;
  // Throws ProcessListUnavailable when no listing can be produced at all.
  virtual std::vector<ProcessSample> list() = 0;
};

// Reads /proc/<pid>/{exe,stat} and /proc/uptime. Kernel threads and processes
// whose exe link cannot be read are skipped.
class ProcfsProcessSource : public ProcessSource {
 public:
  explicit ProcfsProcessSource(std::filesystem::path proc_root = "/proc");
  std::vector<ProcessSample> list() override;

 private:
  std::filesystem::path root_;
  long ticks_per_second_;
};

struct SamplerOptions {
  std::chrono::milliseconds interval{1000};
  // Unset: run until stop is raised.
  std::optional<std::chrono::milliseconds> duration;
  const std::atomic<bool>* stop = nullptr;
  // Injected for tests; defaults to an interruptible sleep.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct SamplerStats {
  std::uint64_t ticks = 0;
  std::uint64_t lines = 0;
  std::uint64_t failed_ticks = 0;
};

// Appends one psinfo line per process with an absolute exe path on every
// tick, flushing after each tick. A run of duration d at interval i makes
// floor(d / i) ticks. Nothing is deduplicated here.
SamplerStats sample_processes(ProcessSource& source, std::ostream& sink,
                              const SamplerOptions& opts);

// Byte-for-byte copy of the kernel export. Throws SourceUnavailable when the
// source cannot be opened.
void snapshot_refsinfo(const std::filesystem::path& source, std::ostream& sink);

// Parses the fields of /proc/<pid>/stat that matter here. Returns nullopt on
// malformed input.
struct ProcStat {
  std::uint64_t utime_ticks = 0;
  std::uint64_t stime_ticks = 0;
  std::uint64_t start_ticks = 0;
};
std::optional<ProcStat> parse_proc_stat(std::string_view text);

}  // namespace pkgprof
