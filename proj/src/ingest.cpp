#include "pkgprof/ingest.hpp"

#include <filesystem>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "text_util.hpp"

namespace pkgprof {

const char* to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::MalformedLine: return "MalformedLine";
    case DiagnosticKind::SuspectSample: return "SuspectSample";
    case DiagnosticKind::UnreadableList: return "UnreadableList";
    case DiagnosticKind::ProbeFailed: return "ProbeFailed";
  }
  return "Unknown";
}

namespace {

std::uint64_t clock_field(std::string_view text, std::string_view field,
                          std::size_t min_digits, std::size_t max_digits,
                          std::uint64_t max_value) {
  if (field.size() < min_digits || field.size() > max_digits) {
    throw BadClockFormat("bad clock field width in '" + std::string(text) + "'");
  }
  auto v = detail::parse_count(field);
  if (!v || *v > max_value) {
    throw BadClockFormat("bad clock field in '" + std::string(text) + "'");
  }
  return *v;
}

constexpr std::uint64_t kUnbounded = ~std::uint64_t{0} / 86400;

}  // namespace

std::uint64_t parse_etime(std::string_view text) {
  std::string_view rest = text;
  std::uint64_t days = 0;
  bool have_days = false;
  if (auto dash = rest.find('-'); dash != std::string_view::npos) {
    days = clock_field(text, rest.substr(0, dash), 1, 9, kUnbounded);
    have_days = true;
    rest.remove_prefix(dash + 1);
  }

  std::string_view parts[3];
  std::size_t n = 0;
  while (true) {
    auto colon = rest.find(':');
    if (n == 3) throw BadClockFormat("too many clock fields in '" + std::string(text) + "'");
    parts[n++] = rest.substr(0, colon);
    if (colon == std::string_view::npos) break;
    rest.remove_prefix(colon + 1);
  }
  if (n < 2 || (have_days && n != 3)) {
    throw BadClockFormat("expected [[dd-]hh:]mm:ss, got '" + std::string(text) + "'");
  }

  std::uint64_t hours = 0;
  if (n == 3) {
    hours = have_days ? clock_field(text, parts[0], 1, 2, 23)
                      : clock_field(text, parts[0], 1, 9, kUnbounded);
  }
  const auto minutes = clock_field(text, parts[n - 2], 2, 2, 59);
  const auto seconds = clock_field(text, parts[n - 1], 2, 2, 59);
  return days * 86400 + hours * 3600 + minutes * 60 + seconds;
}

std::string format_etime(std::uint64_t seconds) {
  const auto days = seconds / 86400;
  const auto hours = (seconds / 3600) % 24;
  const auto minutes = (seconds / 60) % 60;
  const auto secs = seconds % 60;
  auto two = [](std::uint64_t v) {
    std::string s = std::to_string(v);
    return v < 10 ? "0" + s : s;
  };
  std::string out;
  if (days > 0) out = std::to_string(days) + "-" + two(hours) + ":";
  else if (hours > 0) out = two(hours) + ":";
  out += two(minutes) + ":" + two(secs);
  return out;
}

std::vector<RefRecord> merge_refs(std::span<const RefRecord> records) {
  std::vector<RefRecord> merged;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& r : records) {
    auto [it, inserted] = slot.try_emplace(r.filename, merged.size());
    if (inserted) {
      merged.push_back(r);
    } else {
      auto& m = merged[it->second];
      m.n_open += r.n_open;
      m.n_read += r.n_read;
      m.n_close += r.n_close;
    }
  }
  return merged;
}

Parsed<std::vector<RefRecord>> parse_refsinfo(std::istream& in) {
  Parsed<std::vector<RefRecord>> result;
  std::vector<RefRecord> raw;
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = detail::split_last3(line);
    std::optional<std::uint64_t> open, read, close;
    if (fields) {
      open = detail::parse_count((*fields)[1]);
      read = detail::parse_count((*fields)[2]);
      close = detail::parse_count((*fields)[3]);
    }
    if (!fields || !open || !read || !close ||
        !detail::is_absolute((*fields)[0])) {
      result.diagnostics.push_back(
          {DiagnosticKind::MalformedLine, line_no,
           "expected <absolute path>,<nopen>,<nread>,<nclose>"});
      continue;
    }
    raw.push_back({std::string((*fields)[0]), *open, *read, *close});
  }
  result.value = merge_refs(raw);
  return result;
}

Parsed<std::vector<RefRecord>> parse_refsinfo(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_refsinfo(in);
}

Parsed<std::vector<ProcessSample>> parse_psinfo(std::istream& in,
                                                const PsinfoOptions& opts) {
  Parsed<std::vector<ProcessSample>> result;
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = detail::split_last3(line);
    auto malformed = [&](std::string why) {
      result.diagnostics.push_back(
          {DiagnosticKind::MalformedLine, line_no, std::move(why)});
    };
    if (!fields) {
      malformed("expected <exe>,<etime>,<pid>,<cputime>");
      continue;
    }
    const auto& [exe, etime, pid_text, cputime] = *fields;
    if (!detail::is_absolute(exe)) {
      malformed("executable path is not absolute");
      continue;
    }
    auto pid = detail::parse_count(pid_text);
    if (!pid || *pid == 0) {
      malformed("pid is not a positive integer");
      continue;
    }
    ProcessSample sample{std::string(exe), *pid, 0, 0};
    try {
      sample.elapsed_s = parse_etime(etime);
      sample.cpu_s = parse_etime(cputime);
    } catch (const BadClockFormat& e) {
      malformed(e.what());
      continue;
    }
    if (sample.cpu_s > sample.elapsed_s * opts.core_bound) {
      result.diagnostics.push_back(
          {DiagnosticKind::SuspectSample, line_no,
           "cpu time " + std::to_string(sample.cpu_s) +
               "s exceeds elapsed " + std::to_string(sample.elapsed_s) +
               "s times the core bound"});
    }
    result.value.push_back(std::move(sample));
  }
  return result;
}

Parsed<std::vector<ProcessSample>> parse_psinfo(std::string_view text,
                                                const PsinfoOptions& opts) {
  std::istringstream in{std::string(text)};
  return parse_psinfo(in, opts);
}

void write_refsinfo(std::span<const RefRecord> records, std::ostream& out) {
  for (const auto& r : records) {
    out << r.filename << ',' << r.n_open << ',' << r.n_read << ','
        << r.n_close << '\n';
  }
}

std::string format_psinfo_line(const ProcessSample& s) {
  return s.exe_path + "," + format_etime(s.elapsed_s) + "," +
         std::to_string(s.pid) + "," + format_etime(s.cpu_s);
}

void write_psinfo(std::span<const ProcessSample> samples, std::ostream& out) {
  for (const auto& s : samples) out << format_psinfo_line(s) << '\n';
}

std::string canonical_path(const std::string& path) {
  std::error_code ec;
  auto canon = std::filesystem::weakly_canonical(path, ec);
  if (ec) return path;
  return canon.string();
}

std::vector<RefRecord> canonicalize_refs(std::span<const RefRecord> records) {
  std::vector<RefRecord> out(records.begin(), records.end());
  for (auto& r : out) r.filename = canonical_path(r.filename);
  return merge_refs(out);
}

std::vector<ProcessSample> canonicalize_samples(
    std::span<const ProcessSample> samples) {
  std::vector<ProcessSample> out(samples.begin(), samples.end());
  for (auto& s : out) s.exe_path = canonical_path(s.exe_path);
  return out;
}

}  // namespace pkgprof
