#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pkgprof/diagnostics.hpp"

namespace pkgprof {

// Executable -> shared libraries it loads. The linker listing is already
// transitive, so the map is flat.
class DependencyMap {
 public:
  using LibrarySet = std::set<std::string>;

  // Self-dependencies are dropped. Executables only appear once they have at
  // least one library.
  void add(const std::string& exe, const std::string& lib);
  void merge(const DependencyMap& other);

  const LibrarySet& libraries_of(const std::string& exe) const;
  const std::map<std::string, LibrarySet>& by_exe() const { return by_exe_; }
  bool empty() const { return by_exe_.empty(); }

  friend bool operator==(const DependencyMap&, const DependencyMap&) = default;

 private:
  std::map<std::string, LibrarySet> by_exe_;
};

class ProbeUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// `<exe>\t<lib>` per line.
Parsed<DependencyMap> load_dependency_map(std::istream& in);
Parsed<DependencyMap> load_dependency_map(const std::filesystem::path& file);

// Writes `<exe>\t<lib>` lines in sorted order.
void write_dependency_map(const DependencyMap& map, std::ostream& out);

// Extracts resolved absolute paths from dynamic-linker listing output:
// `name => /abs/path (addr)` and `/abs/path (addr)`. vdso, `not found`, and
// other unresolved entries are dropped.
std::set<std::string> parse_linker_listing(std::string_view output);

struct ProbeOptions {
  std::string tool = "ldd";
  unsigned max_parallel = 0;  // 0: hardware concurrency
};

// Runs the listing tool once per executable (no shell involved). Throws
// ProbeUnavailable when the tool cannot be found; per-executable failures map
// the exe to the empty set and add a ProbeFailed diagnostic.
Parsed<DependencyMap> probe_live(const std::set<std::string>& exe_paths,
                                 const ProbeOptions& opts = {});

}  // namespace pkgprof
