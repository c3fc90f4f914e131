#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "pkgprof/collect.hpp"
#include "pkgprof/deps.hpp"
#include "pkgprof/ingest.hpp"
#include "pkgprof/pkgdb.hpp"
#include "pkgprof/report.hpp"
#include "pkgprof/scorer.hpp"
#include "pkgprof/simulate.hpp"

namespace pkgprof::cli {

namespace {

std::atomic<bool> g_stop{false};

void on_terminate(int) { g_stop.store(true); }

// Thrown for problems that should exit with kDataError.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void report_diagnostics(std::ostream& err, const std::string& source,
                        const Diagnostics& diags) {
  for (const auto& d : diags) {
    err << source;
    if (d.line) err << ':' << d.line;
    err << ": warning: " << to_string(d.kind) << ": " << d.message << '\n';
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

// `out.csv` -> `out.cdf.csv`; paths without .csv get the suffix appended.
std::string with_suffix(const std::string& path, const std::string& suffix) {
  constexpr std::string_view kCsv = ".csv";
  std::string stem = path;
  if (stem.size() > kCsv.size() && stem.ends_with(kCsv)) {
    stem.resize(stem.size() - kCsv.size());
  }
  return stem + suffix;
}

template <class Emit>
void write_file(const std::string& path, Emit&& emit) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  emit(out);
}

struct ScoreArgs {
  std::string refsinfo;
  std::string psinfo;
  std::string manifest_dir;
  std::string manifest;
  std::string depmap;
  bool probe_deps = false;
  std::string config;
  std::string out_files;
  std::string out_packages;
  bool cdf = false;
  bool hist = false;
  std::size_t bins = 20;
  bool log_bins = false;
  bool linear_bins = false;
  bool canonicalize = false;
};

DependencyMap canonicalize_deps(const DependencyMap& deps) {
  DependencyMap out;
  for (const auto& [exe, libs] : deps.by_exe()) {
    for (const auto& lib : libs) out.add(canonical_path(exe), canonical_path(lib));
  }
  return out;
}

int cmd_score(const ScoreArgs& a, std::ostream& err) {
  std::vector<RefRecord> refs;
  {
    auto in = open_input(a.refsinfo);
    auto parsed = parse_refsinfo(in);
    report_diagnostics(err, a.refsinfo, parsed.diagnostics);
    refs = std::move(parsed.value);
  }

  std::vector<ProcessSample> samples;
  if (!a.psinfo.empty()) {
    auto in = open_input(a.psinfo);
    auto parsed = parse_psinfo(in);
    report_diagnostics(err, a.psinfo, parsed.diagnostics);
    samples = std::move(parsed.value);
  }

  OwnershipIndex index;
  {
    auto parsed = a.manifest_dir.empty() ? load_consolidated_manifest(
                                               std::filesystem::path(a.manifest))
                                         : load_manifest_dir(a.manifest_dir);
    report_diagnostics(err, a.manifest_dir.empty() ? a.manifest : a.manifest_dir,
                       parsed.diagnostics);
    index = std::move(parsed.value);
  }

  const ScoreConfig cfg = a.config.empty() ? ScoreConfig{} : load_score_config(a.config);

  if (a.canonicalize) {
    refs = canonicalize_refs(refs);
    samples = canonicalize_samples(samples);
  }

  DependencyMap deps;
  bool have_deps = false;
  if (a.probe_deps) {
    std::set<std::string> exes;
    for (const auto& s : samples) exes.insert(s.exe_path);
    try {
      auto probed = probe_live(exes);
      report_diagnostics(err, "probe", probed.diagnostics);
      deps = std::move(probed.value);
      have_deps = true;
    } catch (const ProbeUnavailable& e) {
      err << "warning: " << e.what()
          << (a.depmap.empty() ? "; no library propagation\n"
                               : "; falling back to --depmap\n");
    }
  }
  if (!have_deps && !a.depmap.empty()) {
    auto parsed = load_dependency_map(std::filesystem::path(a.depmap));
    report_diagnostics(err, a.depmap, parsed.diagnostics);
    deps = std::move(parsed.value);
  }
  if (a.canonicalize) deps = canonicalize_deps(deps);

  const auto table = build_score_table(refs, samples, deps, cfg);
  const auto packages = aggregate_packages(table, index);

  const auto files = file_totals(table);
  const auto pkgs = package_totals(packages);
  write_file(a.out_files, [&](std::ostream& o) { emit_csv(rank(files, ReportKind::File), o); });
  write_file(a.out_packages,
             [&](std::ostream& o) { emit_csv(rank(pkgs, ReportKind::Package), o); });

  const Binning hist_binning = a.linear_bins ? Binning::Linear : Binning::Log10;
  const std::pair<const std::string*, const ScoreMap*> outputs[] = {
      {&a.out_files, &files}, {&a.out_packages, &pkgs}};
  for (const auto& [path, scores] : outputs) {
    if (a.cdf) {
      auto dist = distribution(*scores, Binning::Linear, a.bins);
      write_file(with_suffix(*path, ".cdf.csv"),
                 [&](std::ostream& o) { emit_cdf_csv(dist, o); });
    }
    if (a.hist) {
      auto dist = distribution(*scores, hist_binning, a.bins);
      write_file(with_suffix(*path, ".hist.csv"),
                 [&](std::ostream& o) { emit_hist_csv(dist, o); });
    }
  }

  const auto zero = std::count_if(packages.begin(), packages.end(), [](const auto& p) {
    return p.total == 0.0 && p.package != kUnownedPackage;
  });
  err << "scored " << table.size() << " files, " << packages.size()
      << " packages (" << zero << " with zero score)\n";
  return kOk;
}

struct CollectArgs {
  double interval_s = 1.0;
  std::optional<double> duration_s;
  std::string psinfo_out;
  std::string refsinfo_src = "/proc/refsinfo";
  std::string refsinfo_out;
};

std::chrono::milliseconds to_ms(double seconds) {
  return std::chrono::milliseconds(static_cast<std::int64_t>(seconds * 1000.0 + 0.5));
}

int cmd_collect(const CollectArgs& a, std::ostream& err) {
  std::ofstream psinfo;
  std::ofstream refsinfo;
  if (!a.psinfo_out.empty()) {
    psinfo.open(a.psinfo_out, std::ios::app | std::ios::binary);
    if (!psinfo) err << "warning: cannot open " << a.psinfo_out << " for append\n";
  }
  if (!a.refsinfo_out.empty()) {
    refsinfo.open(a.refsinfo_out, std::ios::trunc | std::ios::binary);
    if (!refsinfo) err << "warning: cannot open " << a.refsinfo_out << " for writing\n";
  }
  const bool sampling = psinfo.is_open();
  const bool snapshot = refsinfo.is_open();
  if (!sampling && !snapshot) {
    err << "error: neither psinfo nor refsinfo output is writable\n";
    return kDataError;
  }

  g_stop.store(false);
  auto old_int = std::signal(SIGINT, on_terminate);
  auto old_term = std::signal(SIGTERM, on_terminate);
  struct RestoreSignals {
    decltype(old_int) i, t;
    ~RestoreSignals() {
      std::signal(SIGINT, i);
      std::signal(SIGTERM, t);
    }
  } restore{old_int, old_term};

  int status = kOk;
  if (sampling) {
    ProcfsProcessSource source;
    SamplerOptions opts;
    opts.interval = to_ms(a.interval_s);
    if (a.duration_s) opts.duration = to_ms(*a.duration_s);
    opts.stop = &g_stop;
    try {
      auto stats = sample_processes(source, psinfo, opts);
      err << "sampled " << stats.ticks << " ticks, " << stats.lines << " lines";
      if (stats.failed_ticks) err << ", " << stats.failed_ticks << " failed ticks";
      err << '\n';
    } catch (const ProcessListUnavailable& e) {
      err << "error: " << e.what() << '\n';
      status = kDataError;
    }
  }
  if (snapshot) {
    try {
      snapshot_refsinfo(a.refsinfo_src, refsinfo);
    } catch (const SourceUnavailable& e) {
      err << "warning: " << e.what() << '\n';
      if (!sampling) status = kDataError;
    }
  }
  return status;
}

struct SimulateArgs {
  WorkloadSpec spec;
  std::string out_dir;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& err) {
  auto files = generate(a.spec);
  write_workload(files, a.out_dir);
  err << "wrote workload (seed " << a.spec.rng_seed << ") to " << a.out_dir << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Debian package usage profiler", "pkgprof"};
  app.require_subcommand(1);

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score files and packages from collected logs");
  score_cmd->add_option("--refsinfo", score.refsinfo, "Kernel reference-count CSV")->required();
  score_cmd->add_option("--psinfo", score.psinfo, "Process sample log");
  auto* manifest_group = score_cmd->add_option_group("manifest");
  manifest_group->add_option("--manifest-dir", score.manifest_dir,
                             "dpkg info directory with <package>.list files");
  manifest_group->add_option("--manifest", score.manifest,
                             "Consolidated <package>\\t<path> manifest");
  manifest_group->require_option(1);
  score_cmd->add_option("--depmap", score.depmap, "Static <exe>\\t<lib> dependency map");
  score_cmd->add_flag("--probe-deps", score.probe_deps,
                      "Probe executables with the dynamic linker listing tool");
  score_cmd->add_option("--config", score.config, "key=value weight file");
  score_cmd->add_option("--out-files", score.out_files, "Ranked file CSV")->required();
  score_cmd->add_option("--out-packages", score.out_packages, "Ranked package CSV")->required();
  score_cmd->add_flag("--cdf", score.cdf, "Also write .cdf.csv distributions");
  score_cmd->add_flag("--hist", score.hist, "Also write .hist.csv histograms");
  score_cmd->add_option("--bins", score.bins, "Histogram bin count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* log_flag = score_cmd->add_flag("--log-bins", score.log_bins,
                                       "Decade-scaled histogram bins (default)");
  score_cmd->add_flag("--linear-bins", score.linear_bins, "Equal-width histogram bins")
      ->excludes(log_flag);
  score_cmd->add_flag("--canonicalize-paths", score.canonicalize,
                      "Resolve symlinks in trace paths on this host before lookup");

  CollectArgs collect;
  double duration = -1.0;
  auto* collect_cmd = app.add_subcommand("collect", "Sample processes and snapshot refsinfo");
  collect_cmd->add_option("--interval", collect.interval_s, "Seconds between samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* duration_opt = collect_cmd->add_option("--duration", duration,
                                               "Seconds to sample (default: until signalled)")
                           ->check(CLI::NonNegativeNumber);
  collect_cmd->add_option("--psinfo-out", collect.psinfo_out, "psinfo log to append to");
  collect_cmd->add_option("--refsinfo-src", collect.refsinfo_src, "Kernel export to snapshot")
      ->capture_default_str();
  collect_cmd->add_option("--refsinfo-out", collect.refsinfo_out, "Snapshot destination");

  SimulateArgs simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic workload fixture");
  sim_cmd->add_option("--seed", simulate.spec.rng_seed, "RNG seed")->capture_default_str();
  sim_cmd->add_option("--packages", simulate.spec.n_packages, "Installed packages")
      ->capture_default_str();
  sim_cmd->add_option("--daemons", simulate.spec.n_daemons, "Long-lived processes")
      ->capture_default_str();
  sim_cmd->add_option("--short-lived", simulate.spec.n_shortlived, "Short-lived processes")
      ->capture_default_str();
  sim_cmd->add_option("--uptime", simulate.spec.uptime_s, "Simulated uptime in seconds")
      ->capture_default_str();
  sim_cmd->add_option("--core-lib-fraction", simulate.spec.core_lib_fraction,
                      "Fraction of libraries linked by every executable")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sim_cmd->add_option("--unused-fraction", simulate.spec.unused_package_fraction,
                      "Chance a package is never used")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sim_cmd->add_option("--out-dir", simulate.out_dir, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // Help requests exit 0; everything else is a usage error.
    return app.exit(e, out, err) == 0 ? kOk : kUsageError;
  }

  try {
    if (score_cmd->parsed()) return cmd_score(score, err);
    if (collect_cmd->parsed()) {
      if (collect.psinfo_out.empty() && collect.refsinfo_out.empty()) {
        err << "error: collect needs --psinfo-out and/or --refsinfo-out\n\n"
            << collect_cmd->help();
        return kUsageError;
      }
      if (*duration_opt) collect.duration_s = duration;
      return cmd_collect(collect, err);
    }
    if (sim_cmd->parsed()) return cmd_simulate(simulate, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace pkgprof::cli
