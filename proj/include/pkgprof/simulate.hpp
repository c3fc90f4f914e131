#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "pkgprof/scorer.hpp"

namespace pkgprof {

// Shape of a synthetic embedded-system workload.
struct WorkloadSpec {
  std::uint32_t n_packages = 20;
  std::uint32_t min_files_per_package = 2;
  std::uint32_t max_files_per_package = 12;
  std::uint32_t n_daemons = 3;
  std::uint32_t n_shortlived = 10;
  std::uint64_t uptime_s = 7 * 86400;
  // Fraction of the library pool that every executable links against.
  double core_lib_fraction = 0.2;
  // Chance that a package (other than the first two) is never touched.
  double unused_package_fraction = 0.3;
  std::uint64_t rng_seed = 1;
};

// The four text artifacts, in the same formats the pipeline reads.
struct WorkloadFiles {
  std::string refsinfo;
  std::string psinfo;
  std::string manifest;
  std::string depmap;
};

// Deterministic for a given spec, byte for byte. Throws std::invalid_argument
// for fractions outside [0, 1] or min > max files per package.
WorkloadFiles generate(const WorkloadSpec& spec);

// Writes refsinfo.csv, psinfo.csv, manifest.tsv and depmap.tsv into dir,
// creating it if needed. Throws IoError when a file cannot be written.
void write_workload(const WorkloadFiles& files, const std::filesystem::path& dir);

inline constexpr const char* kRefsinfoFile = "refsinfo.csv";
inline constexpr const char* kPsinfoFile = "psinfo.csv";
inline constexpr const char* kManifestFile = "manifest.tsv";
inline constexpr const char* kDepmapFile = "depmap.tsv";

struct OracleResult {
  // path -> {s_fs, s_ps, total}
  std::map<std::string, std::array<double, 3>> files;
  std::map<std::string, double> packages;
  std::size_t skipped_lines = 0;
};

// Straight nested-loop evaluation of the scoring rules over the raw texts.
// Shares no parsing or scoring code with the pipeline; tests compare the two.
OracleResult oracle_score(const std::string& refsinfo, const std::string& psinfo,
                          const std::string& manifest, const std::string& depmap,
                          const ScoreConfig& cfg);

}  // namespace pkgprof
