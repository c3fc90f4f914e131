#include <sstream>

#include "doctest.h"
#include "pkgprof/report.hpp"
#include "pkgprof/simulate.hpp"
#include "test_support.hpp"

using namespace pkgprof;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
  WorkloadSpec spec;
  spec.rng_seed = 42;
  auto a = generate(spec);
  auto b = generate(spec);
  CHECK(a.refsinfo == b.refsinfo);
  CHECK(a.psinfo == b.psinfo);
  CHECK(a.manifest == b.manifest);
  CHECK(a.depmap == b.depmap);

  spec.rng_seed = 43;
  CHECK(generate(spec).refsinfo != a.refsinfo);
}

TEST_CASE("generated texts parse cleanly") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    WorkloadSpec spec;
    spec.rng_seed = seed;
    auto w = generate(spec);
    CHECK(parse_refsinfo(w.refsinfo).diagnostics.empty());
    CHECK(parse_psinfo(w.psinfo).diagnostics.empty());
    std::istringstream man(w.manifest), dep(w.depmap);
    CHECK(load_consolidated_manifest(man).diagnostics.empty());
    CHECK(load_dependency_map(dep).diagnostics.empty());
  }
}

TEST_CASE("full core fraction links every executable to every library") {
  WorkloadSpec spec;
  spec.core_lib_fraction = 1.0;
  spec.rng_seed = 5;
  auto w = generate(spec);
  std::istringstream dep(w.depmap);
  auto deps = load_dependency_map(dep).value;

  std::set<std::string> libs;
  for (const auto& [exe, ls] : deps.by_exe()) libs.insert(ls.begin(), ls.end());
  REQUIRE_FALSE(libs.empty());
  for (const auto& [exe, ls] : deps.by_exe()) CHECK(ls == libs);
}

TEST_CASE("no processes means empty psinfo") {
  WorkloadSpec spec;
  spec.n_daemons = 0;
  spec.n_shortlived = 0;
  CHECK(generate(spec).psinfo.empty());
}

TEST_CASE("zero packages still yields a valid workload") {
  WorkloadSpec spec;
  spec.n_packages = 0;
  auto w = generate(spec);
  CHECK(w.manifest.empty());
  CHECK_FALSE(w.psinfo.empty());
}

TEST_CASE("daemons run for about the whole uptime") {
  WorkloadSpec spec;
  spec.n_daemons = 4;
  spec.n_shortlived = 0;
  spec.uptime_s = 10 * 86400;
  auto samples = parse_psinfo(generate(spec).psinfo).value;
  REQUIRE_FALSE(samples.empty());
  for (const auto& s : samples) {
    CHECK(s.elapsed_s + 310 >= spec.uptime_s);
    CHECK(s.cpu_s <= s.elapsed_s);
  }
}

TEST_CASE("unused packages get zero references") {
  WorkloadSpec spec;
  spec.n_packages = 30;
  spec.unused_package_fraction = 0.5;
  spec.rng_seed = 9;
  auto w = generate(spec);
  auto result = oracle_score(w.refsinfo, w.psinfo, w.manifest, w.depmap, {});
  std::size_t zero = 0;
  for (const auto& [pkg, score] : result.packages) zero += score == 0.0;
  CHECK(zero > 0);
  CHECK(zero < result.packages.size());
}

TEST_CASE("invalid specs are rejected") {
  WorkloadSpec spec;
  spec.core_lib_fraction = 1.5;
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  spec = {};
  spec.min_files_per_package = 5;
  spec.max_files_per_package = 2;
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

TEST_CASE("oracle on the one-exe, one-library instance") {
  auto r = oracle_score("/bin/a,1,5,1\n", "/bin/a,00:10,7,00:02\n", "", "/bin/a\t/lib/L\n", {});
  REQUIRE(r.files.size() == 2);
  CHECK(r.files.at("/bin/a") == std::array<double, 3>{26, 20, 46});
  CHECK(r.files.at("/lib/L") == std::array<double, 3>{0, 20, 20});
  CHECK(r.packages.at(std::string(kUnownedPackage)) == 66);

  auto empty = oracle_score("", "", "", "", {});
  CHECK(empty.files.empty());
  CHECK(empty.packages.empty());
}

TEST_CASE("oracle skips the same bad lines the parsers reject") {
  auto r = oracle_score("/ok,1,1,1\nrel,1,1,1\n/x,1,a,1\n", "/b,0:10,3,00:00\n/b,00:10,0,00:00\n",
                        "BAD\t/x\nok\trel\n", "nope\n", {});
  CHECK(r.files.size() == 1);
  CHECK(r.skipped_lines == 7);
}

TEST_CASE("write_workload uses the fixed file names") {
  testing::TempDir dir;
  auto w = generate({});
  write_workload(w, dir / "out");
  CHECK(testing::read_text(dir / "out" / kRefsinfoFile) == w.refsinfo);
  CHECK(testing::read_text(dir / "out" / kPsinfoFile) == w.psinfo);
  CHECK(testing::read_text(dir / "out" / kManifestFile) == w.manifest);
  CHECK(testing::read_text(dir / "out" / kDepmapFile) == w.depmap);

  testing::write_text(dir / "file", "x");
  CHECK_THROWS_AS(write_workload(w, dir / "file" / "sub"), IoError);
}

TEST_CASE("top file is a core library when a daemon runs") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    WorkloadSpec spec;
    spec.rng_seed = seed;
    auto w = generate(spec);
    auto r = oracle_score(w.refsinfo, w.psinfo, w.manifest, w.depmap, {});
    ScoreMap totals;
    for (const auto& [path, t] : r.files) totals[path] = t[2];
    auto top = rank(totals).rows.front().first;
    CAPTURE(seed);
    CHECK(top.find(".so.") != std::string::npos);
    CHECK(lines(w.depmap).size() > 0);
  }
}
