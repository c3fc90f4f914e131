// Brute-force reference scorer. Deliberately naive: plain vectors, linear
// scans, its own line splitting. Nothing here is shared with the pipeline.

#include <string>
#include <vector>

#include "pkgprof/simulate.hpp"

namespace pkgprof {

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  return lines;
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

double to_number(const std::string& s) {
  double v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

// Splits off the last three comma-separated fields.
bool split4(const std::string& line, std::string out[4]) {
  int commas[3];
  int found = 0;
  for (int i = static_cast<int>(line.size()) - 1; i >= 0 && found < 3; --i) {
    if (line[i] == ',') commas[found++] = i;
  }
  if (found < 3) return false;
  out[0] = line.substr(0, commas[2]);
  out[1] = line.substr(commas[2] + 1, commas[1] - commas[2] - 1);
  out[2] = line.substr(commas[1] + 1, commas[0] - commas[1] - 1);
  out[3] = line.substr(commas[0] + 1);
  return !out[0].empty() && out[0][0] == '/';
}

// [[dd-]hh:]mm:ss -> seconds, or -1.
double clock_seconds(const std::string& text) {
  std::string days = "0";
  std::string rest = text;
  bool have_days = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '-') {
      days = text.substr(0, i);
      rest = text.substr(i + 1);
      have_days = true;
      break;
    }
  }
  std::vector<std::string> parts(1);
  for (char c : rest) {
    if (c == ':') parts.emplace_back();
    else parts.back() += c;
  }
  if (parts.size() < 2 || parts.size() > 3) return -1;
  if (have_days && parts.size() != 3) return -1;
  if (have_days && (days.empty() || days.size() > 9)) return -1;
  if (!all_digits(days)) return -1;
  for (const auto& p : parts) {
    if (!all_digits(p)) return -1;
  }
  const std::string& ss = parts[parts.size() - 1];
  const std::string& mm = parts[parts.size() - 2];
  if (ss.size() != 2 || mm.size() != 2) return -1;
  if (to_number(ss) > 59 || to_number(mm) > 59) return -1;
  double hh = 0;
  if (parts.size() == 3) {
    if (parts[0].size() > (have_days ? 2u : 9u)) return -1;
    hh = to_number(parts[0]);
    if (have_days && hh > 23) return -1;
  }
  return to_number(days) * 86400 + hh * 3600 + to_number(mm) * 60 + to_number(ss);
}

bool valid_package(const std::string& name) {
  if (name.empty()) return false;
  bool seen_colon = false;
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    bool alnum = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (i == 0 && !alnum) return false;
    if (c == ':') {
      if (seen_colon || i + 1 == name.size()) return false;
      seen_colon = true;
      continue;
    }
    if (seen_colon) {
      if (!alnum && c != '-') return false;
    } else if (!alnum && c != '+' && c != '-' && c != '.') {
      return false;
    }
  }
  return true;
}

struct Sample {
  std::string exe;
  std::string pid;
  double elapsed, cpu;
};

struct Pair {
  std::string a, b;
};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  for (const auto& x : v) {
    if (x == s) return true;
  }
  return false;
}

bool has_pair(const std::vector<Pair>& v, const std::string& a, const std::string& b) {
  for (const auto& p : v) {
    if (p.a == a && p.b == b) return true;
  }
  return false;
}

// Tab-separated `<a>\t<b>` lines.
bool split_tab(const std::string& line, Pair& out) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\t') {
      out.a = line.substr(0, i);
      out.b = line.substr(i + 1);
      return true;
    }
  }
  return false;
}

}  // namespace

OracleResult oracle_score(const std::string& refsinfo, const std::string& psinfo,
                          const std::string& manifest, const std::string& depmap,
                          const ScoreConfig& cfg) {
  OracleResult result;

  // Reference records, kept as raw lines; merged during scoring.
  std::vector<std::string> ref_names;
  std::vector<double> ref_open, ref_read, ref_close;
  for (const auto& line : lines_of(refsinfo)) {
    if (line.empty()) continue;
    std::string f[4];
    if (!split4(line, f) || !all_digits(f[1]) || !all_digits(f[2]) || !all_digits(f[3])) {
      ++result.skipped_lines;
      continue;
    }
    ref_names.push_back(f[0]);
    ref_open.push_back(to_number(f[1]));
    ref_read.push_back(to_number(f[2]));
    ref_close.push_back(to_number(f[3]));
  }

  std::vector<Sample> samples;
  for (const auto& line : lines_of(psinfo)) {
    if (line.empty()) continue;
    std::string f[4];
    if (!split4(line, f) || !all_digits(f[2]) || to_number(f[2]) == 0) {
      ++result.skipped_lines;
      continue;
    }
    double te = clock_seconds(f[1]);
    double tc = clock_seconds(f[3]);
    if (te < 0 || tc < 0) {
      ++result.skipped_lines;
      continue;
    }
    // Strip leading zeros so "07" and "7" name the same pid.
    std::string pid = f[2];
    while (pid.size() > 1 && pid[0] == '0') pid.erase(0, 1);
    samples.push_back({f[0], pid, te, tc});
  }

  std::vector<Pair> owns;
  std::vector<std::string> packages;
  for (const auto& line : lines_of(manifest)) {
    if (line.empty()) continue;
    Pair p;
    if (!split_tab(line, p) || !valid_package(p.a) ||
        (!p.b.empty() && p.b[0] != '/')) {
      ++result.skipped_lines;
      continue;
    }
    if (!contains(packages, p.a)) packages.push_back(p.a);
    if (!p.b.empty() && !has_pair(owns, p.a, p.b)) owns.push_back(p);
  }

  std::vector<Pair> deps;
  for (const auto& line : lines_of(depmap)) {
    if (line.empty()) continue;
    Pair p;
    if (!split_tab(line, p) || p.a.empty() || p.b.empty() || p.a[0] != '/' ||
        p.b[0] != '/') {
      ++result.skipped_lines;
      continue;
    }
    if (p.a != p.b && !has_pair(deps, p.a, p.b)) deps.push_back(p);
  }

  // A sample counts when no other sample of the same exe and pid beats it:
  // larger elapsed, then larger cpu, then earlier position.
  std::vector<Sample> kept;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    bool beaten = false;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      if (i == j) continue;
      const auto& a = samples[i];
      const auto& b = samples[j];
      if (a.exe != b.exe || a.pid != b.pid) continue;
      if (b.elapsed > a.elapsed ||
          (b.elapsed == a.elapsed && b.cpu > a.cpu) ||
          (b.elapsed == a.elapsed && b.cpu == a.cpu && j < i)) {
        beaten = true;
      }
    }
    if (!beaten) kept.push_back(samples[i]);
  }

  std::vector<std::string> exes;
  for (const auto& s : kept) {
    if (!contains(exes, s.exe)) exes.push_back(s.exe);
  }
  auto own_process_score = [&](const std::string& exe) {
    double sum = 0;
    for (const auto& s : kept) {
      if (s.exe == exe) sum += cfg.w_elapsed * s.elapsed + cfg.w_cpu * s.cpu;
    }
    return sum;
  };

  // Every path that ends up with an entry.
  std::vector<std::string> paths;
  for (const auto& n : ref_names) {
    if (!contains(paths, n)) paths.push_back(n);
  }
  for (const auto& e : exes) {
    if (!contains(paths, e)) paths.push_back(e);
  }
  for (const auto& e : exes) {
    if (own_process_score(e) <= 0) continue;
    for (const auto& d : deps) {
      if (d.a == e && !contains(paths, d.b)) paths.push_back(d.b);
    }
  }

  for (const auto& path : paths) {
    double opens = 0, reads = 0, closes = 0;
    for (std::size_t i = 0; i < ref_names.size(); ++i) {
      if (ref_names[i] == path) {
        opens += ref_open[i];
        reads += ref_read[i];
        closes += ref_close[i];
      }
    }
    double net = opens - closes;
    if (cfg.clamp_net_open && net < 0) net = 0;
    double s_fs = cfg.open_bonus * net + cfg.w_open * opens + cfg.w_read * reads +
                  cfg.w_close * closes;

    double s_ps = own_process_score(path);
    for (const auto& e : exes) {
      double ps = own_process_score(e);
      if (ps > 0 && has_pair(deps, e, path)) s_ps += ps;
    }
    result.files[path] = {s_fs, s_ps, cfg.w_f * s_fs + cfg.w_r * s_ps};
  }

  for (const auto& pkg : packages) result.packages[pkg] = 0;
  for (const auto& [path, triple] : result.files) {
    bool owned = false;
    for (const auto& o : owns) {
      if (o.b == path) {
        result.packages[o.a] += triple[2];
        owned = true;
      }
    }
    if (!owned) result.packages[std::string(kUnownedPackage)] += triple[2];
  }
  return result;
}

}  // namespace pkgprof
