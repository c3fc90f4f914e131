#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pkgprof/scorer.hpp"

namespace pkgprof {

enum class ReportKind { File, Package };

// Rows sorted by descending score, ties by ascending name.
struct RankedReport {
  ReportKind kind = ReportKind::File;
  std::vector<std::pair<std::string, double>> rows;
};

enum class Binning { Linear, Log10 };

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;
  std::size_t count = 0;

  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

struct Distribution {
  // (score, fraction of entries <= score), one point per distinct score.
  std::vector<std::pair<double, double>> cdf_points;
  std::vector<HistogramBin> hist_bins;
  Binning binning = Binning::Linear;
};

using ScoreMap = std::map<std::string, double>;

ScoreMap file_totals(const ScoreTable& table);
ScoreMap package_totals(const std::vector<PackageScore>& packages);

RankedReport rank(const ScoreMap& scores, ReportKind kind = ReportKind::File);

// Empirical CDF plus a histogram.
//
// Linear: bin_count equal-width bins over [min(0, lowest), max], the last bin
// closed on the right.
//
// Log10: values below 1 (zeros included) go to a leading underflow bin
// [min(0, lowest), 1); the remaining bin_count bins split [1, max] into equal
// decade-scaled widths. When max <= 1 only the underflow bin is produced.
//
// Empty input gives an empty distribution. Throws std::invalid_argument when
// bin_count is 0.
Distribution distribution(const ScoreMap& scores, Binning binning,
                          std::size_t bin_count = 20);

// `rank,name,score`; names are CSV-quoted when needed. Throws IoError when
// the sink fails.
void emit_csv(const RankedReport& report, std::ostream& sink);
// `score,fraction`
void emit_cdf_csv(const Distribution& dist, std::ostream& sink);
// `bin_low,bin_high,count`
void emit_hist_csv(const Distribution& dist, std::ostream& sink);

// Shortest decimal text that reads back to the same double.
std::string format_score(double value);
std::string csv_field(const std::string& text);

}  // namespace pkgprof
