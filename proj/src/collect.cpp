#include "pkgprof/collect.hpp"

#include <unistd.h>

#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "text_util.hpp"

namespace pkgprof {

std::optional<ProcStat> parse_proc_stat(std::string_view text) {
  // comm is parenthesised and may itself contain spaces and ')'.
  auto close = text.rfind(')');
  if (close == std::string_view::npos) return std::nullopt;
  std::istringstream rest{std::string(text.substr(close + 1))};

  // Fields after comm start at index 3 (state).
  std::string field;
  ProcStat stat;
  for (int index = 3; index <= 22; ++index) {
    if (!(rest >> field)) return std::nullopt;
    std::uint64_t* target = nullptr;
    if (index == 14) target = &stat.utime_ticks;
    if (index == 15) target = &stat.stime_ticks;
    if (index == 22) target = &stat.start_ticks;
    if (target) {
      auto v = detail::parse_count(field);
      if (!v) return std::nullopt;
      *target = *v;
    }
  }
  return stat;
}

ProcfsProcessSource::ProcfsProcessSource(std::filesystem::path proc_root)
    : root_(std::move(proc_root)), ticks_per_second_(::sysconf(_SC_CLK_TCK)) {
  if (ticks_per_second_ <= 0) ticks_per_second_ = 100;
}

std::vector<ProcessSample> ProcfsProcessSource::list() {
  namespace fs = std::filesystem;
  double uptime = 0.0;
  {
    std::ifstream in(root_ / "uptime");
    if (!(in >> uptime)) {
      throw ProcessListUnavailable("cannot read " + (root_ / "uptime").string());
    }
  }

  std::error_code ec;
  fs::directory_iterator it(root_, ec);
  if (ec) throw ProcessListUnavailable("cannot list " + root_.string());

  const auto hz = static_cast<std::uint64_t>(ticks_per_second_);
  std::vector<ProcessSample> out;
  for (const auto& entry : it) {
    const auto name = entry.path().filename().string();
    auto pid = detail::parse_count(name);
    if (!pid || *pid == 0) continue;

    std::error_code link_ec;
    auto exe = fs::read_symlink(entry.path() / "exe", link_ec).string();
    if (link_ec || !detail::is_absolute(exe)) continue;
    constexpr std::string_view kDeleted = " (deleted)";
    if (exe.ends_with(kDeleted)) exe.resize(exe.size() - kDeleted.size());
    if (exe.find('\n') != std::string::npos) continue;

    std::ifstream stat_in(entry.path() / "stat");
    std::stringstream buf;
    buf << stat_in.rdbuf();
    auto stat = parse_proc_stat(buf.str());
    if (!stat) continue;

    const auto now_ticks = static_cast<std::uint64_t>(uptime * static_cast<double>(hz));
    const auto started = stat->start_ticks;
    const std::uint64_t elapsed = now_ticks > started ? (now_ticks - started) / hz : 0;
    const std::uint64_t cpu = (stat->utime_ticks + stat->stime_ticks) / hz;
    out.push_back({std::move(exe), *pid, elapsed, cpu});
  }
  return out;
}

namespace {

void interruptible_sleep(std::chrono::milliseconds total,
                         const std::atomic<bool>* stop) {
  using namespace std::chrono;
  const auto deadline = steady_clock::now() + total;
  while (steady_clock::now() < deadline) {
    if (stop && stop->load()) return;
    auto left = duration_cast<milliseconds>(deadline - steady_clock::now());
    std::this_thread::sleep_for(std::min(left, milliseconds(50)));
  }
}

}  // namespace

SamplerStats sample_processes(ProcessSource& source, std::ostream& sink,
                              const SamplerOptions& opts) {
  if (opts.interval.count() <= 0) {
    throw std::invalid_argument("sampling interval must be positive");
  }
  std::optional<std::uint64_t> max_ticks;
  if (opts.duration) {
    max_ticks = static_cast<std::uint64_t>(opts.duration->count() / opts.interval.count());
  }
  auto stopped = [&] { return opts.stop && opts.stop->load(); };

  SamplerStats stats;
  while (!stopped() && (!max_ticks || stats.ticks < *max_ticks)) {
    if (stats.ticks > 0) {
      if (opts.sleep) opts.sleep(opts.interval);
      else interruptible_sleep(opts.interval, opts.stop);
      if (stopped()) break;
    }
    ++stats.ticks;
    std::vector<ProcessSample> procs;
    try {
      procs = source.list();
    } catch (const ProcessListUnavailable&) {
      // The first tick decides whether the host can be sampled at all.
      if (stats.ticks == 1) throw;
      ++stats.failed_ticks;
      continue;
    }
    for (const auto& p : procs) {
      if (!detail::is_absolute(p.exe_path) || p.pid == 0) continue;
      sink << format_psinfo_line(p) << '\n';
      ++stats.lines;
    }
    sink.flush();
    if (!sink) throw IoError("failed writing psinfo output");
  }
  return stats;
}

void snapshot_refsinfo(const std::filesystem::path& source, std::ostream& sink) {
  std::error_code ec;
  std::ifstream in;
  if (!std::filesystem::is_directory(source, ec)) in.open(source, std::ios::binary);
  if (!in.is_open()) {
    throw SourceUnavailable(
        "cannot read " + source.string() +
        " (needs the reference-counting kernel patch); use `pkgprof simulate` "
        "to generate a refsinfo fixture instead");
  }
  // procfs files report size 0, so copy through the stream buffer.
  char buf[8192];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    sink.write(buf, in.gcount());
  }
  sink.flush();
  if (!sink) throw IoError("failed writing refsinfo snapshot");
}

}  // namespace pkgprof
