#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pkgprof/diagnostics.hpp"

namespace pkgprof {

// Per-file reference counters as exported by the kernel hook.
struct RefRecord {
  std::string filename;
  std::uint64_t n_open = 0;
  std::uint64_t n_read = 0;
  std::uint64_t n_close = 0;

  friend bool operator==(const RefRecord&, const RefRecord&) = default;
};

// One observation of a running process. Durations are whole seconds.
struct ProcessSample {
  std::string exe_path;
  std::uint64_t pid = 0;
  std::uint64_t elapsed_s = 0;
  std::uint64_t cpu_s = 0;

  friend bool operator==(const ProcessSample&, const ProcessSample&) = default;
};

class BadClockFormat : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PsinfoOptions {
  // cpu_s above elapsed_s * core_bound marks a sample as suspect.
  std::uint64_t core_bound = 256;
};

// Parses `[[dd-]hh:]mm:ss` into seconds. Throws BadClockFormat.
std::uint64_t parse_etime(std::string_view text);

// Inverse of parse_etime; emits the shortest shape that holds the value
// (`mm:ss`, `hh:mm:ss` below one day, `d-hh:mm:ss` otherwise).
std::string format_etime(std::uint64_t seconds);

// Lines are `<filename>,<nopen>,<nread>,<nclose>`, split on the last three
// commas. Records with the same filename are summed; output keeps the order of
// first appearance.
Parsed<std::vector<RefRecord>> parse_refsinfo(std::istream& in);
Parsed<std::vector<RefRecord>> parse_refsinfo(std::string_view text);

// Lines are `<exe>,<etime>,<pid>,<cputime>`. Every sample is kept; dedup is
// the scorer's job.
Parsed<std::vector<ProcessSample>> parse_psinfo(std::istream& in,
                                                const PsinfoOptions& opts = {});
Parsed<std::vector<ProcessSample>> parse_psinfo(std::string_view text,
                                                const PsinfoOptions& opts = {});

void write_refsinfo(std::span<const RefRecord> records, std::ostream& out);
void write_psinfo(std::span<const ProcessSample> samples, std::ostream& out);
std::string format_psinfo_line(const ProcessSample& sample);

// Merges records with equal filenames by field-wise summation.
std::vector<RefRecord> merge_refs(std::span<const RefRecord> records);

// Rewrites trace paths through std::filesystem::weakly_canonical on this
// host. Refs that collapse onto the same path are summed.
std::vector<RefRecord> canonicalize_refs(std::span<const RefRecord> records);
std::vector<ProcessSample> canonicalize_samples(
    std::span<const ProcessSample> samples);
std::string canonical_path(const std::string& path);

}  // namespace pkgprof
