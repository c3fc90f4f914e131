#include <random>
#include <sstream>

#include "doctest.h"
#include "pkgprof/report.hpp"

using namespace pkgprof;

namespace {

using Rows = std::vector<std::pair<std::string, double>>;

std::size_t hist_total(const Distribution& d) {
  std::size_t n = 0;
  for (const auto& b : d.hist_bins) n += b.count;
  return n;
}

ScoreMap random_scores(std::mt19937_64& rng) {
  ScoreMap m;
  const auto n = rng() % 300;
  for (std::uint64_t i = 0; i < n; ++i) {
    double v = 0;
    switch (rng() % 4) {
      case 0: v = 0; break;
      case 1: v = static_cast<double>(rng() % 10); break;
      case 2: v = static_cast<double>(rng() % 100000000); break;
      default: v = static_cast<double>(rng() % 1000) / 7.0; break;
    }
    m["n" + std::to_string(i)] = v;
  }
  return m;
}

}  // namespace

TEST_CASE("rank orders by score then name") {
  auto r = rank({{"a", 5}, {"b", 9}, {"c", 5}});
  CHECK(r.rows == Rows{{"b", 9}, {"a", 5}, {"c", 5}});
  CHECK(rank({}).rows.empty());
  CHECK(rank({{"x", 0}}).rows == Rows{{"x", 0}});
}

TEST_CASE("rank is a permutation with non-increasing scores") {
  std::mt19937_64 rng(1);
  for (int round = 0; round < 50; ++round) {
    auto scores = random_scores(rng);
    auto r = rank(scores, ReportKind::Package);
    CHECK(r.kind == ReportKind::Package);
    REQUIRE(r.rows.size() == scores.size());
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
      CHECK(r.rows[i - 1].second >= r.rows[i].second);
      if (r.rows[i - 1].second == r.rows[i].second) {
        CHECK(r.rows[i - 1].first < r.rows[i].first);
      }
    }
    ScoreMap back(r.rows.begin(), r.rows.end());
    CHECK(back == scores);
  }
}

TEST_CASE("linear distribution") {
  auto d = distribution({{"a", 0}, {"b", 5}, {"c", 10}}, Binning::Linear, 2);
  REQUIRE(d.hist_bins.size() == 2);
  CHECK(d.hist_bins[0] == HistogramBin{0, 5, 1});
  CHECK(d.hist_bins[1] == HistogramBin{5, 10, 2});
  REQUIRE(d.cdf_points.size() == 3);
  CHECK(d.cdf_points[0].first == 0);
  CHECK(d.cdf_points[0].second == doctest::Approx(1.0 / 3));
  CHECK(d.cdf_points[1].first == 5);
  CHECK(d.cdf_points[1].second == doctest::Approx(2.0 / 3));
  CHECK(d.cdf_points[2] == std::pair<double, double>{10, 1.0});
}

TEST_CASE("single-value and empty distributions") {
  auto d = distribution({{"a", 7}}, Binning::Linear, 20);
  REQUIRE(d.cdf_points.size() == 1);
  CHECK(d.cdf_points[0] == std::pair<double, double>{7, 1.0});
  CHECK(hist_total(d) == 1);

  auto empty = distribution({}, Binning::Log10, 20);
  CHECK(empty.cdf_points.empty());
  CHECK(empty.hist_bins.empty());

  CHECK_THROWS_AS(distribution({{"a", 1}}, Binning::Linear, 0), std::invalid_argument);
}

TEST_CASE("log10 distribution") {
  SUBCASE("all zero scores fall in the underflow bin") {
    auto d = distribution({{"a", 0}, {"b", 0}, {"c", 0}}, Binning::Log10, 20);
    REQUIRE(d.hist_bins.size() == 1);
    CHECK(d.hist_bins[0] == HistogramBin{0, 1, 3});
  }
  SUBCASE("decade edges") {
    auto d = distribution({{"z", 0}, {"a", 1}, {"b", 10}, {"c", 50}, {"d", 100}},
                          Binning::Log10, 2);
    REQUIRE(d.hist_bins.size() == 3);
    CHECK(d.hist_bins[0] == HistogramBin{0, 1, 1});
    CHECK(d.hist_bins[1].low == 1);
    CHECK(d.hist_bins[1].high == doctest::Approx(10));
    CHECK(d.hist_bins[1].count == 1);
    CHECK(d.hist_bins[2].high == 100);
    CHECK(d.hist_bins[2].count == 3);
  }
}

TEST_CASE("distribution contracts hold for random inputs") {
  std::mt19937_64 rng(2);
  for (int round = 0; round < 100; ++round) {
    auto scores = random_scores(rng);
    for (auto binning : {Binning::Linear, Binning::Log10}) {
      const std::size_t bins = 1 + rng() % 40;
      auto d = distribution(scores, binning, bins);
      CHECK(hist_total(d) == scores.size());
      if (scores.empty()) continue;
      for (std::size_t i = 1; i < d.cdf_points.size(); ++i) {
        CHECK(d.cdf_points[i - 1].first < d.cdf_points[i].first);
        CHECK(d.cdf_points[i - 1].second <= d.cdf_points[i].second);
      }
      CHECK(d.cdf_points.back().second == 1.0);
      for (const auto& b : d.hist_bins) CHECK(b.low <= b.high);
    }
  }
}

TEST_CASE("CSV emission") {
  std::ostringstream out;
  emit_csv(rank({{"b", 9}}), out);
  CHECK(out.str() == "rank,name,score\n1,b,9\n");

  std::ostringstream quoted;
  emit_csv(rank({{"/tmp/a,b", 1.5}, {"say \"hi\"", 0}}), quoted);
  CHECK(quoted.str() == "rank,name,score\n1,\"/tmp/a,b\",1.5\n2,\"say \"\"hi\"\"\",0\n");

  std::ostringstream cdf, hist;
  emit_cdf_csv(Distribution{}, cdf);
  emit_hist_csv(Distribution{}, hist);
  CHECK(cdf.str() == "score,fraction\n");
  CHECK(hist.str() == "bin_low,bin_high,count\n");

  std::ostringstream full;
  emit_cdf_csv(distribution({{"a", 0}, {"b", 5}, {"c", 10}}, Binning::Linear, 2), full);
  CHECK(full.str() == "score,fraction\n0,0.333333\n5,0.666667\n10,1.000000\n");

  std::ostringstream big;
  emit_csv(rank({{"x", 2405492.0}, {"y", 0.1}}), big);
  CHECK(big.str() == "rank,name,score\n1,x,2405492\n2,y,0.1\n");
}

TEST_CASE("format_score round-trips doubles") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 1000; ++i) {
    double v = static_cast<double>(rng()) / static_cast<double>(rng() | 1);
    CHECK(std::stod(format_score(v)) == v);
  }
}

TEST_CASE("failed sink raises IoError") {
  std::ostringstream out;
  out.setstate(std::ios::badbit);
  CHECK_THROWS_AS(emit_csv(rank({{"a", 1}}), out), IoError);
}
