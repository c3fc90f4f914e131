#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "pkgprof/simulate.hpp"
#include "test_support.hpp"

using namespace pkgprof;
using pkgprof::testing::read_text;
using pkgprof::testing::TempDir;
using pkgprof::testing::write_text;

namespace {

struct Run {
  int status;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::vector<std::string> score_args(const TempDir& dir, const std::filesystem::path& fixture) {
  return {"score",
          "--refsinfo", (fixture / kRefsinfoFile).string(),
          "--psinfo", (fixture / kPsinfoFile).string(),
          "--manifest", (fixture / kManifestFile).string(),
          "--depmap", (fixture / kDepmapFile).string(),
          "--out-files", (dir / "files.csv").string(),
          "--out-packages", (dir / "packages.csv").string()};
}

}  // namespace

TEST_CASE("simulate then score produces the CSV artifacts") {
  TempDir dir;
  auto sim = run({"simulate", "--seed", "7", "--out-dir", (dir / "fx").string()});
  REQUIRE(sim.status == cli::kOk);

  auto args = score_args(dir, dir / "fx");
  args.push_back("--cdf");
  auto scored = run(args);
  CHECK(scored.status == cli::kOk);
  CHECK(scored.out.empty());
  for (const char* name : {"files.csv", "packages.csv", "files.cdf.csv", "packages.cdf.csv"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(dir / name));
  }
  CHECK(read_text(dir / "files.csv").starts_with("rank,name,score\n1,/usr/lib/"));
  CHECK(read_text(dir / "packages.cdf.csv").starts_with("score,fraction\n"));

  args.push_back("--hist");
  args.push_back("--bins");
  args.push_back("5");
  args.push_back("--linear-bins");
  CHECK(run(args).status == cli::kOk);
  CHECK(count_lines(read_text(dir / "files.hist.csv")) == 6);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).status == cli::kUsageError);
  CHECK(run({"frobnicate"}).status == cli::kUsageError);
  auto missing = run({"score", "--manifest", "m", "--out-files", "a", "--out-packages", "b"});
  CHECK(missing.status == cli::kUsageError);
  CHECK(missing.err.find("--refsinfo") != std::string::npos);
  // Both manifest sources at once.
  CHECK(run({"score", "--refsinfo", "r", "--manifest", "m", "--manifest-dir", "d",
             "--out-files", "a", "--out-packages", "b"})
            .status == cli::kUsageError);
  CHECK(run({"score", "--refsinfo", "r", "--manifest", "m", "--out-files", "a",
             "--out-packages", "b", "--bins", "0"})
            .status == cli::kUsageError);
  CHECK(run({"collect"}).status == cli::kUsageError);
  CHECK(run({"simulate"}).status == cli::kUsageError);
  CHECK(run({"--help"}).status == cli::kOk);
  CHECK(run({"score", "--help"}).status == cli::kOk);
}

TEST_CASE("bad lines are warnings, not failures") {
  TempDir dir;
  std::string refs;
  for (int i = 0; i < 100; ++i) {
    if (i % 33 == 5) refs += "broken line " + std::to_string(i) + "\n";
    else refs += "/f/" + std::to_string(i) + ",1,1,1\n";
  }
  write_text(dir / "refs.csv", refs);
  write_text(dir / "man.tsv", "pkg\t/f/1\n");
  auto r = run({"score", "--refsinfo", (dir / "refs.csv").string(), "--manifest",
                (dir / "man.tsv").string(), "--out-files", (dir / "f.csv").string(),
                "--out-packages", (dir / "p.csv").string()});
  CHECK(r.status == cli::kOk);
  CHECK(count_lines(r.err) == 4);  // three warnings plus the summary
  CHECK(r.err.find("refs.csv:6: warning: MalformedLine") != std::string::npos);
  CHECK(count_lines(read_text(dir / "f.csv")) == 1 + 97);
}

TEST_CASE("input errors exit 1") {
  TempDir dir;
  write_text(dir / "refs.csv", "/a,1,1,1\n");
  write_text(dir / "man.tsv", "pkg\t/a\n");
  write_text(dir / "bad.conf", "w_raed=3\n");
  auto base = [&] {
    return std::vector<std::string>{"score", "--refsinfo", (dir / "refs.csv").string(),
                                    "--out-files", (dir / "f.csv").string(),
                                    "--out-packages", (dir / "p.csv").string()};
  };

  auto a = base();
  a.insert(a.end(), {"--manifest", (dir / "missing.tsv").string()});
  CHECK(run(a).status == cli::kDataError);

  auto b = base();
  b.insert(b.end(), {"--manifest-dir", (dir / "no-such-dir").string()});
  CHECK(run(b).status == cli::kDataError);

  auto c = base();
  c.insert(c.end(), {"--manifest", (dir / "man.tsv").string(), "--config",
                     (dir / "bad.conf").string()});
  auto rc = run(c);
  CHECK(rc.status == cli::kDataError);
  CHECK(rc.err.find("w_raed") != std::string::npos);

  auto d = base();
  d[2] = (dir / "nope.csv").string();
  d.insert(d.end(), {"--manifest", (dir / "man.tsv").string()});
  CHECK(run(d).status == cli::kDataError);
}

TEST_CASE("score with a dpkg-style manifest dir and a config file") {
  TempDir dir;
  std::filesystem::create_directories(dir / "info");
  write_text(dir / "info" / "libc6.list", "/lib/x/libc.so.6\n");
  write_text(dir / "info" / "bash.list", "/bin/bash\n");
  write_text(dir / "info" / "unused.list", "/usr/share/unused\n");
  write_text(dir / "refs.csv", "/lib/x/libc.so.6,2,10,2\n/bin/bash,1,0,1\n");
  write_text(dir / "ps.csv", "/bin/bash,10:00,99,02:00\n");
  write_text(dir / "deps.tsv", "/bin/bash\t/lib/x/libc.so.6\n");
  write_text(dir / "w.conf", "w_f=2\n");
  auto r = run({"score", "--refsinfo", (dir / "refs.csv").string(), "--psinfo",
                (dir / "ps.csv").string(), "--manifest-dir", (dir / "info").string(),
                "--depmap", (dir / "deps.tsv").string(), "--config",
                (dir / "w.conf").string(), "--out-files", (dir / "f.csv").string(),
                "--out-packages", (dir / "p.csv").string()});
  REQUIRE(r.status == cli::kOk);
  // libc: 2*52 + 1200; bash: 2*(1+0) + 1200.
  CHECK(read_text(dir / "p.csv") == "rank,name,score\n1,libc6,1304\n2,bash,1202\n3,unused,0\n");
}

TEST_CASE("probe-deps falls back to the static map") {
  TempDir dir;
  write_text(dir / "refs.csv", "/x,1,1,1\n");
  write_text(dir / "man.tsv", "pkg\t/x\n");
  auto r = run({"score", "--refsinfo", (dir / "refs.csv").string(), "--manifest",
                (dir / "man.tsv").string(), "--probe-deps", "--out-files",
                (dir / "f.csv").string(), "--out-packages", (dir / "p.csv").string()});
  CHECK(r.status == cli::kOk);
}

TEST_CASE("collect subcommand") {
  TempDir dir;
  SUBCASE("duration 0 exits cleanly") {
    auto r = run({"collect", "--duration", "0", "--psinfo-out", (dir / "ps.log").string()});
    CHECK(r.status == cli::kOk);
    CHECK(read_text(dir / "ps.log").empty());
  }
  SUBCASE("unreadable refsinfo source does not stop psinfo sampling") {
    auto r = run({"collect", "--interval", "0.05", "--duration", "0.1", "--psinfo-out",
                  (dir / "ps.log").string(), "--refsinfo-src", (dir / "missing").string(),
                  "--refsinfo-out", (dir / "refs.csv").string()});
    CHECK(r.status == cli::kOk);
    auto parsed = parse_psinfo(read_text(dir / "ps.log"));
    CHECK_FALSE(parsed.value.empty());
  }
  SUBCASE("refsinfo-only snapshot") {
    write_text(dir / "src", "/a,1,2,3\n");
    auto r = run({"collect", "--refsinfo-src", (dir / "src").string(), "--refsinfo-out",
                  (dir / "copy").string()});
    CHECK(r.status == cli::kOk);
    CHECK(read_text(dir / "copy") == "/a,1,2,3\n");
  }
  SUBCASE("no writable output") {
    auto r = run({"collect", "--duration", "1", "--psinfo-out",
                  (dir / "missing-dir" / "ps.log").string()});
    CHECK(r.status == cli::kDataError);
  }
}

TEST_CASE("simulate into an unwritable directory fails") {
  TempDir dir;
  write_text(dir / "file", "x");
  auto r = run({"simulate", "--out-dir", (dir / "file" / "sub").string()});
  CHECK(r.status == cli::kDataError);
}

TEST_CASE("simulate with zero packages gives an empty manifest") {
  TempDir dir;
  REQUIRE(run({"simulate", "--packages", "0", "--out-dir", (dir / "fx").string()}).status ==
          cli::kOk);
  CHECK(read_text(dir / "fx" / kManifestFile).empty());
  CHECK(run(score_args(dir, dir / "fx")).status == cli::kOk);
}
