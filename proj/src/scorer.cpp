#include "pkgprof/scorer.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

namespace pkgprof {

ScoreConfig ScoreConfig::scaled(double factor) const {
  ScoreConfig out = *this;
  out.open_bonus *= factor;
  out.w_open *= factor;
  out.w_read *= factor;
  out.w_close *= factor;
  out.w_elapsed *= factor;
  out.w_cpu *= factor;
  out.w_f *= factor;
  out.w_r *= factor;
  return out;
}

double score_fs(const RefRecord& rec, const ScoreConfig& cfg) {
  const double opens = static_cast<double>(rec.n_open);
  const double closes = static_cast<double>(rec.n_close);
  double net_open = opens - closes;
  if (cfg.clamp_net_open) net_open = std::max(0.0, net_open);
  return cfg.open_bonus * net_open + cfg.w_open * opens +
         cfg.w_read * static_cast<double>(rec.n_read) + cfg.w_close * closes;
}

double score_ps(const ProcessSample& sample, const ScoreConfig& cfg) {
  return cfg.w_elapsed * static_cast<double>(sample.elapsed_s) +
         cfg.w_cpu * static_cast<double>(sample.cpu_s);
}

std::vector<ProcessSample> latest_per_pid(std::span<const ProcessSample> samples) {
  std::vector<ProcessSample> sorted(samples.begin(), samples.end());
  // Descending elapsed within a (exe, pid) group; cpu breaks exact ties so
  // the pick does not depend on input order.
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::tie(a.exe_path, a.pid, b.elapsed_s, b.cpu_s) <
           std::tie(b.exe_path, b.pid, a.elapsed_s, a.cpu_s);
  });
  auto last = std::unique(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.exe_path == b.exe_path && a.pid == b.pid;
  });
  sorted.erase(last, sorted.end());
  return sorted;
}

ScoreTable build_score_table(std::span<const RefRecord> refs,
                             std::span<const ProcessSample> samples,
                             const DependencyMap& deps, const ScoreConfig& cfg) {
  ScoreTable table;
  auto entry = [&table](const std::string& path) -> FileScore& {
    auto [it, inserted] = table.try_emplace(path);
    if (inserted) it->second.path = path;
    return it->second;
  };

  for (const auto& rec : merge_refs(refs)) {
    entry(rec.filename).s_fs = score_fs(rec, cfg);
  }

  std::map<std::string, double> own_ps;
  for (const auto& sample : latest_per_pid(samples)) {
    own_ps[sample.exe_path] += score_ps(sample, cfg);
  }
  for (const auto& [exe, ps] : own_ps) entry(exe).s_ps += ps;
  for (const auto& [exe, ps] : own_ps) {
    if (ps <= 0.0) continue;
    for (const auto& lib : deps.libraries_of(exe)) entry(lib).s_ps += ps;
  }

  for (auto& [path, fs] : table) fs.total = cfg.w_f * fs.s_fs + cfg.w_r * fs.s_ps;
  return table;
}

std::vector<PackageScore> aggregate_packages(const ScoreTable& table,
                                             const OwnershipIndex& index) {
  std::map<std::string, PackageScore> by_name;
  for (const auto& pkg : index.all_packages()) by_name[pkg] = {pkg, 0.0, 0};

  const std::string unowned(kUnownedPackage);
  for (const auto& [path, fs] : table) {
    const auto& owners = index.owners_of(path);
    if (owners.empty()) {
      auto& bucket = by_name.try_emplace(unowned, PackageScore{unowned, 0.0, 0})
                         .first->second;
      bucket.total += fs.total;
      ++bucket.file_count;
      continue;
    }
    for (const auto& pkg : owners) {
      auto& row = by_name[pkg];
      row.total += fs.total;
      ++row.file_count;
    }
  }

  std::vector<PackageScore> out;
  out.reserve(by_name.size());
  for (auto& [name, row] : by_name) out.push_back(std::move(row));
  return out;
}

}  // namespace pkgprof
