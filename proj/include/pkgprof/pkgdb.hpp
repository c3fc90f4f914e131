#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>

#include "pkgprof/diagnostics.hpp"

namespace pkgprof {

// Pseudo-package that collects scores of files no installed package owns.
inline constexpr std::string_view kUnownedPackage = "(unowned)";

// Debian policy charset (lowercase alphanumerics, '+', '-', '.'), starting
// with an alphanumeric. An optional `:arch` qualifier is accepted, as found
// in multiarch dpkg info directories.
bool is_valid_package_name(std::string_view name);

// Reverse file -> package map. Immutable once built.
class OwnershipIndex {
 public:
  using PackageSet = std::set<std::string>;

  // Declares a package even if it owns nothing.
  void add_package(const std::string& package);
  void add_file(const std::string& package, const std::string& path);

  // Exact-match lookup; symlinks are not resolved. Absent paths yield {}.
  const PackageSet& owners_of(const std::string& path) const;

  const PackageSet& all_packages() const { return all_packages_; }
  const std::unordered_map<std::string, PackageSet>& by_file() const {
    return by_file_;
  }
  std::size_t file_count() const { return by_file_.size(); }

  friend bool operator==(const OwnershipIndex&, const OwnershipIndex&) = default;

 private:
  std::unordered_map<std::string, PackageSet> by_file_;
  PackageSet all_packages_;
};

// Reads every `<package>.list` in dir (the dpkg info layout). Throws IoError
// when dir is missing; unreadable lists are skipped with a diagnostic.
Parsed<OwnershipIndex> load_manifest_dir(const std::filesystem::path& dir);

// `<package>\t<path>` per line; `<package>\t` declares an empty package.
Parsed<OwnershipIndex> load_consolidated_manifest(std::istream& in);
Parsed<OwnershipIndex> load_consolidated_manifest(
    const std::filesystem::path& file);

// Writes the consolidated form, packages and paths in sorted order.
void write_consolidated_manifest(const OwnershipIndex& index, std::ostream& out);

}  // namespace pkgprof
