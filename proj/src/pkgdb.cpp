#include "pkgprof/pkgdb.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <vector>

#include "text_util.hpp"

namespace pkgprof {

namespace {

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' ||
         c == '-' || c == '.';
}

bool is_alnum_lower(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

}  // namespace

bool is_valid_package_name(std::string_view name) {
  auto colon = name.find(':');
  std::string_view base = name.substr(0, colon);
  if (base.empty() || !is_alnum_lower(base.front())) return false;
  if (!std::all_of(base.begin(), base.end(), is_name_char)) return false;
  if (colon == std::string_view::npos) return true;
  std::string_view arch = name.substr(colon + 1);
  return !arch.empty() && std::all_of(arch.begin(), arch.end(), [](char c) {
    return is_alnum_lower(c) || c == '-';
  });
}

void OwnershipIndex::add_package(const std::string& package) {
  all_packages_.insert(package);
}

void OwnershipIndex::add_file(const std::string& package,
                              const std::string& path) {
  all_packages_.insert(package);
  by_file_[path].insert(package);
}

const OwnershipIndex::PackageSet& OwnershipIndex::owners_of(
    const std::string& path) const {
  static const PackageSet kEmpty;
  auto it = by_file_.find(path);
  return it == by_file_.end() ? kEmpty : it->second;
}

Parsed<OwnershipIndex> load_manifest_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError("manifest directory not found: " + dir.string());
  }

  // Directory iteration order is unspecified; sort for stable diagnostics.
  std::vector<fs::path> lists;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".list") lists.push_back(entry.path());
  }
  if (ec) throw IoError("cannot read manifest directory: " + dir.string());
  std::sort(lists.begin(), lists.end());

  Parsed<OwnershipIndex> result;
  for (const auto& list : lists) {
    const std::string package = list.stem().string();
    if (!is_valid_package_name(package)) {
      result.diagnostics.push_back({DiagnosticKind::UnreadableList, 0,
                                    list.filename().string() +
                                        ": invalid package name, skipped"});
      continue;
    }
    std::ifstream in(list);
    if (!in) {
      result.diagnostics.push_back({DiagnosticKind::UnreadableList, 0,
                                    list.filename().string() +
                                        ": cannot open, skipped"});
      continue;
    }
    result.value.add_package(package);
    std::string line;
    std::size_t line_no = 0;
    while (detail::read_line(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      if (!detail::is_absolute(line)) {
        result.diagnostics.push_back({DiagnosticKind::MalformedLine, line_no,
                                      list.filename().string() +
                                          ": path is not absolute"});
        continue;
      }
      result.value.add_file(package, line);
    }
  }
  return result;
}

Parsed<OwnershipIndex> load_consolidated_manifest(std::istream& in) {
  Parsed<OwnershipIndex> result;
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      result.diagnostics.push_back(
          {DiagnosticKind::MalformedLine, line_no, "expected <package>\\t<path>"});
      continue;
    }
    std::string package = line.substr(0, tab);
    std::string path = line.substr(tab + 1);
    if (!is_valid_package_name(package)) {
      result.diagnostics.push_back({DiagnosticKind::MalformedLine, line_no,
                                    "invalid package name '" + package + "'"});
      continue;
    }
    if (path.empty()) {
      result.value.add_package(package);
    } else if (!detail::is_absolute(path)) {
      result.diagnostics.push_back(
          {DiagnosticKind::MalformedLine, line_no, "path is not absolute"});
    } else {
      result.value.add_file(package, path);
    }
  }
  return result;
}

Parsed<OwnershipIndex> load_consolidated_manifest(
    const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open manifest: " + file.string());
  return load_consolidated_manifest(in);
}

void write_consolidated_manifest(const OwnershipIndex& index,
                                 std::ostream& out) {
  std::map<std::string, std::vector<std::string>> files;
  for (const auto& pkg : index.all_packages()) files[pkg];
  for (const auto& [path, owners] : index.by_file()) {
    for (const auto& pkg : owners) files[pkg].push_back(path);
  }
  for (auto& [pkg, paths] : files) {
    if (paths.empty()) {
      out << pkg << "\t\n";
      continue;
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) out << pkg << '\t' << p << '\n';
  }
}

}  // namespace pkgprof
