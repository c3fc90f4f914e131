#include "pkgprof/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace pkgprof {

namespace {

// std distributions are implementation-defined; map the engine output by
// hand so fixtures are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    if (hi <= lo) return lo;
    return lo + engine_() % (hi - lo + 1);
  }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

enum class PackageKind { Library, Application, Data };

struct Package {
  std::string name;
  PackageKind kind;
  bool used = true;
  std::vector<std::string> files;
};

struct Ref {
  std::string path;
  std::uint64_t open, read, close;
};

std::string etime(std::uint64_t s) {
  char buf[48];
  const auto d = s / 86400, h = (s / 3600) % 24, m = (s / 60) % 60, sec = s % 60;
  if (d > 0) {
    std::snprintf(buf, sizeof buf, "%llu-%02llu:%02llu:%02llu",
                  static_cast<unsigned long long>(d), static_cast<unsigned long long>(h),
                  static_cast<unsigned long long>(m), static_cast<unsigned long long>(sec));
  } else if (h > 0) {
    std::snprintf(buf, sizeof buf, "%02llu:%02llu:%02llu",
                  static_cast<unsigned long long>(h), static_cast<unsigned long long>(m),
                  static_cast<unsigned long long>(sec));
  } else {
    std::snprintf(buf, sizeof buf, "%02llu:%02llu", static_cast<unsigned long long>(m),
                  static_cast<unsigned long long>(sec));
  }
  return buf;
}

std::vector<Package> make_packages(const WorkloadSpec& spec, Rng& rng) {
  static const char* kLibDir = "/usr/lib/x86_64-linux-gnu/";
  std::vector<Package> pkgs;
  for (std::uint32_t i = 0; i < spec.n_packages; ++i) {
    Package p;
    p.kind = static_cast<PackageKind>(i % 3);
    switch (p.kind) {
      case PackageKind::Library: p.name = "libsim" + std::to_string(i); break;
      case PackageKind::Application: p.name = "simapp" + std::to_string(i); break;
      case PackageKind::Data: p.name = "simdata" + std::to_string(i); break;
    }
    // The first library and application package are always in use.
    p.used = i < 2 || !rng.chance(spec.unused_package_fraction);

    auto count = rng.between(spec.min_files_per_package, spec.max_files_per_package);
    // Every system has a libc: the first library package ships at least one .so.
    if (i == 0) count = std::max<std::uint64_t>(count, 1);
    for (std::uint64_t j = 0; j < count; ++j) {
      const auto js = std::to_string(j);
      const bool primary = j == 0 || j % 2 == 1;
      switch (p.kind) {
        case PackageKind::Library:
          p.files.push_back(primary ? kLibDir + p.name + "-" + js + ".so." + std::to_string(j % 3)
                                    : "/usr/share/" + p.name + "/data" + js + ".dat");
          break;
        case PackageKind::Application:
          p.files.push_back(primary ? "/usr/bin/" + p.name + (j ? "-" + js : "")
                                    : "/usr/share/" + p.name + "/res" + js + ".dat");
          break;
        case PackageKind::Data:
          p.files.push_back(j == 3 ? "/usr/share/" + p.name + "/item," + js + ".csv"
                                   : "/usr/share/" + p.name + "/file" + js + ".txt");
          break;
      }
    }
    pkgs.push_back(std::move(p));
  }
  return pkgs;
}

bool is_shared_library(const std::string& path) {
  return path.find(".so") != std::string::npos;
}

}  // namespace

WorkloadFiles generate(const WorkloadSpec& spec) {
  if (spec.core_lib_fraction < 0.0 || spec.core_lib_fraction > 1.0 ||
      spec.unused_package_fraction < 0.0 || spec.unused_package_fraction > 1.0) {
    throw std::invalid_argument("workload fractions must lie in [0, 1]");
  }
  if (spec.min_files_per_package > spec.max_files_per_package) {
    throw std::invalid_argument("min files per package exceeds max");
  }

  Rng rng(spec.rng_seed);
  auto pkgs = make_packages(spec, rng);

  std::vector<std::string> libs, exes, data;
  for (const auto& p : pkgs) {
    if (!p.used) continue;
    for (const auto& f : p.files) {
      if (is_shared_library(f)) libs.push_back(f);
      else if (f.starts_with("/usr/bin/")) exes.push_back(f);
      else data.push_back(f);
    }
  }
  // A locally built binary that no package owns.
  exes.push_back("/opt/local/bin/sim-agent");

  std::size_t n_core = 0;
  if (spec.core_lib_fraction > 0.0 && !libs.empty()) {
    n_core = std::min(libs.size(), static_cast<std::size_t>(std::ceil(
                                       spec.core_lib_fraction * static_cast<double>(libs.size()))));
  }

  // Dependency sets: every core library plus a random subset of the rest.
  std::vector<std::vector<std::string>> exe_libs(exes.size());
  for (std::size_t e = 0; e < exes.size(); ++e) {
    for (std::size_t l = 0; l < libs.size(); ++l) {
      if (l < n_core || rng.chance(0.3)) exe_libs[e].push_back(libs[l]);
    }
  }

  // Processes.
  struct Proc {
    std::size_t exe;
    std::uint64_t pid, elapsed, cpu, samples;
  };
  std::vector<Proc> procs;
  std::uint64_t next_pid = 300;
  for (std::uint32_t d = 0; d < spec.n_daemons; ++d) {
    Proc p{rng.between(0, exes.size() - 1), next_pid, 0, 0, 0};
    next_pid += rng.between(1, 40);
    p.elapsed = spec.uptime_s - rng.between(0, std::min<std::uint64_t>(spec.uptime_s, 300));
    p.cpu = rng.between(0, p.elapsed / 10);
    p.samples = rng.between(1, 3);
    procs.push_back(p);
  }
  for (std::uint32_t s = 0; s < spec.n_shortlived; ++s) {
    Proc p{rng.between(0, exes.size() - 1), next_pid, 0, 0, 0};
    next_pid += rng.between(1, 40);
    p.elapsed = rng.between(0, std::min<std::uint64_t>(spec.uptime_s, 600));
    p.cpu = rng.between(0, p.elapsed);
    p.samples = rng.between(1, 2);
    procs.push_back(p);
  }

  WorkloadFiles out;
  {
    // Emit tick by tick, the way the 1 s collector appends.
    std::ostringstream ps;
    std::uint64_t max_samples = 0;
    for (const auto& p : procs) max_samples = std::max(max_samples, p.samples);
    for (std::uint64_t tick = 0; tick < max_samples; ++tick) {
      for (const auto& p : procs) {
        if (tick >= p.samples) continue;
        const auto behind = p.samples - 1 - tick;
        const auto elapsed = p.elapsed - std::min(p.elapsed, behind);
        const auto cpu = std::min(elapsed, p.cpu - std::min(p.cpu, behind));
        ps << exes[p.exe] << ',' << etime(elapsed) << ',' << p.pid << ','
           << etime(cpu) << '\n';
      }
    }
    out.psinfo = ps.str();
  }

  // Reference counts.
  std::vector<bool> exe_ran(exes.size(), false);
  std::vector<bool> lib_loaded(libs.size(), false);
  bool daemon_running = spec.n_daemons > 0;
  for (const auto& p : procs) {
    exe_ran[p.exe] = true;
    for (const auto& lib : exe_libs[p.exe]) {
      auto at = std::find(libs.begin(), libs.end(), lib) - libs.begin();
      lib_loaded[static_cast<std::size_t>(at)] = true;
    }
  }

  std::vector<Ref> refs;
  const std::uint64_t hours = spec.uptime_s / 3600;
  const std::uint64_t minutes = spec.uptime_s / 60;
  for (std::size_t l = 0; l < libs.size(); ++l) {
    if (l < n_core && (daemon_running || lib_loaded[l])) {
      const auto opens = hours + rng.between(1, 20);
      refs.push_back({libs[l], opens, minutes + rng.between(300, 1000),
                      opens - rng.between(0, std::min<std::uint64_t>(opens, 2))});
    } else if (lib_loaded[l] || rng.chance(0.2)) {
      const auto opens = rng.between(1, 10) + hours / 4;
      refs.push_back({libs[l], opens, rng.between(10, 200) + minutes / 8,
                      opens - rng.between(0, std::min<std::uint64_t>(opens, 1))});
    }
  }
  for (std::size_t e = 0; e + 1 < exes.size(); ++e) {
    if (!exe_ran[e] && !rng.chance(0.3)) continue;
    const auto opens = rng.between(1, 5);
    refs.push_back({exes[e], opens, rng.between(0, 50), opens});
  }
  for (const auto& f : data) {
    if (!rng.chance(0.6)) continue;
    const auto opens = rng.between(1, 10);
    refs.push_back({f, opens, rng.between(0, 50), opens});
  }
  // Unowned paths, one of them comma-bearing.
  refs.push_back({"/etc/ld.so.cache", procs.size() + 1, procs.size() + 1, procs.size() + 1});
  refs.push_back({"/tmp/sim-scratch," + std::to_string(spec.rng_seed) + ".log",
                  rng.between(1, 4), rng.between(0, 20), 0});
  // Shared directory listed by every used package.
  refs.push_back({"/usr/share/doc", 1, 0, 1});

  {
    std::ostringstream rs;
    for (const auto& r : refs) {
      rs << r.path << ',' << r.open << ',' << r.read << ',' << r.close << '\n';
    }
    out.refsinfo = rs.str();
  }
  {
    std::ostringstream ms;
    for (const auto& p : pkgs) {
      if (p.files.empty() && !p.used) ms << p.name << "\t\n";
      if (p.used) ms << p.name << "\t/usr/share/doc\n";
      for (const auto& f : p.files) ms << p.name << '\t' << f << '\n';
    }
    out.manifest = ms.str();
  }
  {
    std::ostringstream ds;
    for (std::size_t e = 0; e < exes.size(); ++e) {
      for (const auto& lib : exe_libs[e]) ds << exes[e] << '\t' << lib << '\n';
    }
    out.depmap = ds.str();
  }
  return out;
}

void write_workload(const WorkloadFiles& files, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const std::pair<const char*, const std::string*> outputs[] = {
      {kRefsinfoFile, &files.refsinfo},
      {kPsinfoFile, &files.psinfo},
      {kManifestFile, &files.manifest},
      {kDepmapFile, &files.depmap},
  };
  for (const auto& [name, text] : outputs) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    out << *text;
    out.flush();
    if (!out) throw IoError("cannot write " + (dir / name).string());
  }
}

}  // namespace pkgprof
