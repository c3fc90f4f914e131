#include "pkgprof/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace pkgprof {

ScoreMap file_totals(const ScoreTable& table) {
  ScoreMap out;
  for (const auto& [path, fs] : table) out.emplace(path, fs.total);
  return out;
}

ScoreMap package_totals(const std::vector<PackageScore>& packages) {
  ScoreMap out;
  for (const auto& p : packages) out.emplace(p.package, p.total);
  return out;
}

RankedReport rank(const ScoreMap& scores, ReportKind kind) {
  RankedReport report{kind, {scores.begin(), scores.end()}};
  // ScoreMap iterates by name already; a stable sort on score keeps that as
  // the tie-break.
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return report;
}

namespace {

// Index of the bin holding v given ascending edges e[0..n]; bins are
// [e[i], e[i+1]) except the last, which is closed.
std::size_t bin_index(const std::vector<double>& edges, double v) {
  auto it = std::upper_bound(edges.begin(), edges.end(), v);
  auto idx = static_cast<std::size_t>(std::distance(edges.begin(), it));
  idx = idx == 0 ? 0 : idx - 1;
  return std::min(idx, edges.size() - 2);
}

std::vector<HistogramBin> bins_from_edges(const std::vector<double>& edges) {
  std::vector<HistogramBin> bins;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    bins.push_back({edges[i], edges[i + 1], 0});
  }
  return bins;
}

}  // namespace

Distribution distribution(const ScoreMap& scores, Binning binning,
                          std::size_t bin_count) {
  if (bin_count == 0) throw std::invalid_argument("bin_count must be >= 1");
  Distribution dist;
  dist.binning = binning;
  if (scores.empty()) return dist;

  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& [name, v] : scores) values.push_back(v);
  std::sort(values.begin(), values.end());
  const auto n = values.size();

  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n && values[i + 1] == values[i]) continue;
    dist.cdf_points.emplace_back(values[i], static_cast<double>(i + 1) /
                                                static_cast<double>(n));
  }

  const double lowest = std::min(0.0, values.front());
  const double max = values.back();

  if (binning == Binning::Linear) {
    const double hi = max > lowest ? max : lowest + 1.0;
    const double width = (hi - lowest) / static_cast<double>(bin_count);
    std::vector<double> edges(bin_count + 1);
    for (std::size_t i = 0; i <= bin_count; ++i) {
      edges[i] = lowest + width * static_cast<double>(i);
    }
    edges.back() = hi;
    dist.hist_bins = bins_from_edges(edges);
    for (double v : values) ++dist.hist_bins[bin_index(edges, v)].count;
    return dist;
  }

  dist.hist_bins.push_back({lowest, 1.0, 0});
  std::vector<double> edges;
  if (max > 1.0) {
    const double decades = std::log10(max);
    edges.resize(bin_count + 1);
    for (std::size_t i = 0; i <= bin_count; ++i) {
      edges[i] = std::pow(10.0, decades * static_cast<double>(i) /
                                    static_cast<double>(bin_count));
    }
    edges.front() = 1.0;
    edges.back() = max;
    auto main_bins = bins_from_edges(edges);
    dist.hist_bins.insert(dist.hist_bins.end(), main_bins.begin(), main_bins.end());
  }
  for (double v : values) {
    if (v < 1.0) {
      ++dist.hist_bins.front().count;
    } else {
      ++dist.hist_bins[1 + bin_index(edges, v)].count;
    }
  }
  return dist;
}

std::string format_score(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

void check(std::ostream& sink) {
  if (!sink) throw IoError("failed writing CSV output");
}

std::string fraction6(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", f);
  return buf;
}

}  // namespace

void emit_csv(const RankedReport& report, std::ostream& sink) {
  sink << "rank,name,score\n";
  std::size_t position = 0;
  for (const auto& [name, score] : report.rows) {
    sink << ++position << ',' << csv_field(name) << ',' << format_score(score)
         << '\n';
  }
  sink.flush();
  check(sink);
}

void emit_cdf_csv(const Distribution& dist, std::ostream& sink) {
  sink << "score,fraction\n";
  for (const auto& [score, fraction] : dist.cdf_points) {
    sink << format_score(score) << ',' << fraction6(fraction) << '\n';
  }
  sink.flush();
  check(sink);
}

void emit_hist_csv(const Distribution& dist, std::ostream& sink) {
  sink << "bin_low,bin_high,count\n";
  for (const auto& bin : dist.hist_bins) {
    sink << format_score(bin.low) << ',' << format_score(bin.high) << ','
         << bin.count << '\n';
  }
  sink.flush();
  check(sink);
}

}  // namespace pkgprof
