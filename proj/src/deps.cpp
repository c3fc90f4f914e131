#include "pkgprof/deps.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include "text_util.hpp"

extern char** environ;

namespace pkgprof {

void DependencyMap::add(const std::string& exe, const std::string& lib) {
  if (lib != exe) by_exe_[exe].insert(lib);
}

void DependencyMap::merge(const DependencyMap& other) {
  for (const auto& [exe, libs] : other.by_exe_) {
    auto& mine = by_exe_[exe];
    mine.insert(libs.begin(), libs.end());
  }
}

const DependencyMap::LibrarySet& DependencyMap::libraries_of(
    const std::string& exe) const {
  static const LibrarySet kEmpty;
  auto it = by_exe_.find(exe);
  return it == by_exe_.end() ? kEmpty : it->second;
}

Parsed<DependencyMap> load_dependency_map(std::istream& in) {
  Parsed<DependencyMap> result;
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      result.diagnostics.push_back(
          {DiagnosticKind::MalformedLine, line_no, "expected <exe>\\t<lib>"});
      continue;
    }
    std::string exe = line.substr(0, tab);
    std::string lib = line.substr(tab + 1);
    if (!detail::is_absolute(exe) || !detail::is_absolute(lib)) {
      result.diagnostics.push_back({DiagnosticKind::MalformedLine, line_no,
                                    "paths must be absolute"});
      continue;
    }
    result.value.add(exe, lib);
  }
  return result;
}

Parsed<DependencyMap> load_dependency_map(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open dependency map: " + file.string());
  return load_dependency_map(in);
}

void write_dependency_map(const DependencyMap& map, std::ostream& out) {
  for (const auto& [exe, libs] : map.by_exe()) {
    for (const auto& lib : libs) out << exe << '\t' << lib << '\n';
  }
}

std::set<std::string> parse_linker_listing(std::string_view output) {
  std::set<std::string> libs;
  std::istringstream in{std::string(output)};
  std::string line;
  while (detail::read_line(in, line)) {
    std::string_view rest = line;
    auto first = rest.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    rest.remove_prefix(first);

    if (auto arrow = rest.find("=>"); arrow != std::string_view::npos) {
      rest.remove_prefix(arrow + 2);
      auto start = rest.find_first_not_of(" \t");
      if (start == std::string_view::npos) continue;
      rest.remove_prefix(start);
    }
    if (rest.empty() || rest.front() != '/') continue;

    // Path runs up to the " (0x...)" load address, if any.
    auto addr = rest.rfind(" (");
    std::string_view path = addr == std::string_view::npos ? rest : rest.substr(0, addr);
    while (!path.empty() && (path.back() == ' ' || path.back() == '\t')) {
      path.remove_suffix(1);
    }
    if (!path.empty()) libs.emplace(path);
  }
  return libs;
}

namespace {

bool tool_on_path(const std::string& tool) {
  if (tool.find('/') != std::string::npos) {
    return ::access(tool.c_str(), X_OK) == 0;
  }
  const char* env = std::getenv("PATH");
  std::string_view path = env ? env : "/usr/bin:/bin";
  while (true) {
    auto colon = path.find(':');
    std::string dir(path.substr(0, colon));
    if (dir.empty()) dir = ".";
    if (::access((dir + "/" + tool).c_str(), X_OK) == 0) return true;
    if (colon == std::string_view::npos) return false;
    path.remove_prefix(colon + 1);
  }
}

struct ProbeOutcome {
  std::string exe;
  std::set<std::string> libs;
  std::string error;
};

// Runs `tool exe` with stdout and stderr captured through one pipe.
ProbeOutcome run_probe(const std::string& tool, const std::string& exe) {
  ProbeOutcome outcome{exe, {}, {}};
  int fds[2];
  if (::pipe(fds) != 0) {
    outcome.error = "pipe failed";
    return outcome;
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addclose(&actions, fds[0]);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDERR_FILENO);
  posix_spawn_file_actions_addclose(&actions, fds[1]);

  std::vector<char*> argv{const_cast<char*>(tool.c_str()),
                          const_cast<char*>(exe.c_str()), nullptr};
  pid_t child = 0;
  int rc = ::posix_spawnp(&child, tool.c_str(), &actions, nullptr, argv.data(),
                          environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(fds[1]);
  if (rc != 0) {
    ::close(fds[0]);
    outcome.error = "spawn failed";
    return outcome;
  }

  std::string output;
  char buf[4096];
  ssize_t n;
  while ((n = ::read(fds[0], buf, sizeof buf)) > 0) output.append(buf, n);
  ::close(fds[0]);
  int status = 0;
  ::waitpid(child, &status, 0);

  if (output.find("not a dynamic executable") != std::string::npos ||
      output.find("statically linked") != std::string::npos) {
    return outcome;
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    auto nl = output.find('\n');
    outcome.error = output.substr(0, nl);
    if (outcome.error.empty()) outcome.error = "listing tool failed";
    return outcome;
  }
  outcome.libs = parse_linker_listing(output);
  outcome.libs.erase(exe);
  return outcome;
}

}  // namespace

Parsed<DependencyMap> probe_live(const std::set<std::string>& exe_paths,
                                 const ProbeOptions& opts) {
  if (!tool_on_path(opts.tool)) {
    throw ProbeUnavailable("dynamic linker listing tool not found: " + opts.tool);
  }
  unsigned width = opts.max_parallel ? opts.max_parallel
                                     : std::max(1u, std::thread::hardware_concurrency());

  std::vector<std::string> exes(exe_paths.begin(), exe_paths.end());
  std::vector<ProbeOutcome> outcomes;
  outcomes.reserve(exes.size());
  for (std::size_t begin = 0; begin < exes.size(); begin += width) {
    std::vector<std::future<ProbeOutcome>> batch;
    auto end = std::min(exes.size(), begin + width);
    for (auto i = begin; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, run_probe, opts.tool, exes[i]));
    }
    for (auto& f : batch) outcomes.push_back(f.get());
  }

  // Outcomes are in exe order, so the merge is independent of completion order.
  Parsed<DependencyMap> result;
  for (const auto& o : outcomes) {
    if (!o.error.empty()) {
      result.diagnostics.push_back(
          {DiagnosticKind::ProbeFailed, 0, o.exe + ": " + o.error});
      continue;
    }
    for (const auto& lib : o.libs) result.value.add(o.exe, lib);
  }
  return result;
}

}  // namespace pkgprof
