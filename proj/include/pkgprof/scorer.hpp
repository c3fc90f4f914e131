#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pkgprof/deps.hpp"
#include "pkgprof/ingest.hpp"
#include "pkgprof/pkgdb.hpp"

namespace pkgprof {

// Weights for the file-reference and process components of a file score.
// All weights are non-negative.
struct ScoreConfig {
  double open_bonus = 100.0;  // per handle still open at export time
  double w_open = 1.0;
  double w_read = 5.0;
  double w_close = 0.0;
  double w_elapsed = 1.0;
  double w_cpu = 5.0;
  double w_f = 1.0;  // combiner weight on the reference score
  double w_r = 1.0;  // combiner weight on the process score
  // Floors the open bonus at zero when closes outnumber opens.
  bool clamp_net_open = true;

  // Multiplies all seven weights by factor.
  ScoreConfig scaled(double factor) const;

  friend bool operator==(const ScoreConfig&, const ScoreConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat `key=value` lines; `#` starts a comment. Unknown keys, malformed
// numbers, and negative weights throw ConfigError naming the line.
ScoreConfig load_score_config(std::istream& in);
ScoreConfig load_score_config(const std::string& path);
void write_score_config(const ScoreConfig& cfg, std::ostream& out);

struct FileScore {
  std::string path;
  double s_fs = 0.0;
  double s_ps = 0.0;
  double total = 0.0;

  friend bool operator==(const FileScore&, const FileScore&) = default;
};

struct PackageScore {
  std::string package;
  double total = 0.0;
  std::size_t file_count = 0;

  friend bool operator==(const PackageScore&, const PackageScore&) = default;
};

using ScoreTable = std::map<std::string, FileScore>;

// B * net_open + w_open * n_open + w_read * n_read + w_close * n_close, with
// net_open = n_open - n_close floored at zero when clamp_net_open is set.
double score_fs(const RefRecord& rec, const ScoreConfig& cfg);

// w_elapsed * elapsed_s + w_cpu * cpu_s.
double score_ps(const ProcessSample& sample, const ScoreConfig& cfg);

// Keeps one sample per (exe, pid): the one with the largest elapsed time.
// Output is sorted by (exe, pid), so the result does not depend on log order.
std::vector<ProcessSample> latest_per_pid(std::span<const ProcessSample> samples);

// Builds per-file scores:
//  - s_fs from the (merged) reference records;
//  - each executable's own s_ps is the sum of score_ps over its distinct pids;
//  - every library of an executable with positive own s_ps receives that
//    amount on top of its own s_ps;
//  - total = w_f * s_fs + w_r * s_ps.
ScoreTable build_score_table(std::span<const RefRecord> refs,
                             std::span<const ProcessSample> samples,
                             const DependencyMap& deps, const ScoreConfig& cfg);

// One row per installed package (zero-score packages included), sorted by
// name, plus a kUnownedPackage row when some scored file has no owner. Every
// owner of a multi-owner file is credited with the file's full total.
std::vector<PackageScore> aggregate_packages(const ScoreTable& table,
                                             const OwnershipIndex& index);

}  // namespace pkgprof
