#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "regmine/errors.hpp"
#include "regmine/irr.hpp"
#include "support.hpp"

using namespace regmine;
using Catch::Matchers::WithinAbs;

namespace {

RatingMatrix matrix(std::vector<std::string> categories, std::vector<std::vector<int>> counts) {
  RatingMatrix m;
  m.categories = std::move(categories);
  m.counts = std::move(counts);
  return m;
}

std::map<std::string, AnnotatorRatings> fixture_sets() {
  const std::string dir = std::string(REGMINE_SOURCE_DIR) + "/fixtures/irr/";
  std::vector<Annotation> rows;
  for (const char* file : {"rater_a.csv", "rater_b.csv"}) {
    for (auto& a : load_annotations(dir + file, {0, 1, 2})) rows.push_back(a);
  }
  return group_by_annotator(rows);
}

}  // namespace

TEST_CASE("kappa on a worked two-rater example is exactly one third") {
  // Ratings (A,A), (A,B), (B,B): per-item agreement 1, 0, 1 so P = 2/3;
  // both marginals are 1/2 so Pe = 1/2; kappa = (2/3 - 1/2)/(1 - 1/2) = 1/3.
  auto m = matrix({"A", "B"}, {{2, 0}, {1, 1}, {0, 2}});
  CHECK(m.items() == 3);
  CHECK(m.raters() == 2);
  CHECK(m.k() == 2);
  CHECK_THAT(fleiss_kappa(m), WithinAbs(1.0 / 3.0, 1e-12));
}

TEST_CASE("unanimous ratings across several categories give exactly 1") {
  CHECK(fleiss_kappa(matrix({"A", "B"}, {{2, 0}, {0, 2}})) == 1.0);
  CHECK(fleiss_kappa(matrix({"A", "B", "C"}, {{3, 0, 0}, {0, 3, 0}, {0, 0, 3}, {3, 0, 0}})) ==
        1.0);
}

TEST_CASE("systematic disagreement goes negative") {
  // Two raters always split: P = 0 while Pe = 1/2, so kappa = -1.
  CHECK_THAT(fleiss_kappa(matrix({"A", "B"}, {{1, 1}, {1, 1}})), WithinAbs(-1.0, 1e-12));
}

TEST_CASE("degenerate and underpowered inputs are rejected") {
  CHECK_THROWS_MATCHES(fleiss_kappa(matrix({"A"}, {{2}, {2}})), Error,
                       ErrorCodeIs(Errc::DegenerateDistribution));
  CHECK_THROWS_MATCHES(fleiss_kappa(matrix({"A", "B"}, {{2, 0}, {2, 0}})), Error,
                       ErrorCodeIs(Errc::DegenerateDistribution));
  CHECK_THROWS_MATCHES(fleiss_kappa(matrix({"A", "B"}, {{1, 0}})), Error,
                       ErrorCodeIs(Errc::TooFewRaters));
  CHECK_THROWS_MATCHES(fleiss_kappa(matrix({"A", "B"}, {})), Error,
                       ErrorCodeIs(Errc::TooFewRaters));
}

TEST_CASE("ragged or inconsistent matrices are rejected") {
  CHECK_THROWS_MATCHES(fleiss_kappa(matrix({"A", "B"}, {{2, 0}, {1}})), Error,
                       ErrorCodeIs(Errc::CoverageMismatch));
  CHECK_THROWS_MATCHES(fleiss_kappa(matrix({"A", "B"}, {{2, 0}, {1, 0}})), Error,
                       ErrorCodeIs(Errc::CoverageMismatch));
  CHECK_THROWS_MATCHES(fleiss_kappa(matrix({"A", "B"}, {{3, -1}, {1, 1}})), Error,
                       ErrorCodeIs(Errc::CoverageMismatch));
}

TEST_CASE("kappa is invariant under item and category permutations") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 100; ++round) {
    const std::size_t k = 2 + rng() % 3;
    const std::size_t items = 2 + rng() % 8;
    const int raters = 2 + static_cast<int>(rng() % 4);
    RatingMatrix m;
    for (std::size_t j = 0; j < k; ++j) m.categories.push_back("c" + std::to_string(j));
    for (std::size_t i = 0; i < items; ++i) {
      std::vector<int> row(k, 0);
      for (int r = 0; r < raters; ++r) ++row[rng() % k];
      m.counts.push_back(std::move(row));
    }

    double base;
    try {
      base = fleiss_kappa(m);
    } catch (const Error&) {
      continue;  // degenerate draw
    }

    RatingMatrix shuffled = m;
    std::shuffle(shuffled.counts.begin(), shuffled.counts.end(), rng);
    std::vector<std::size_t> perm(k);
    for (std::size_t j = 0; j < k; ++j) perm[j] = j;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (auto& row : shuffled.counts) {
      std::vector<int> next(k);
      for (std::size_t j = 0; j < k; ++j) next[j] = row[perm[j]];
      row = std::move(next);
    }
    CHECK_THAT(fleiss_kappa(shuffled), WithinAbs(base, 1e-12));
  }
}

TEST_CASE("the rating matrix uses composite event|valence categories") {
  auto m = rating_matrix(fixture_sets());
  REQUIRE(m.categories == std::vector<std::string>{"Challenge|Neutral", "Failure|Neutral"});
  REQUIRE(m.counts == std::vector<std::vector<int>>{{0, 2}, {1, 1}, {2, 0}});
}

TEST_CASE("matrix construction needs two complete annotator sets") {
  auto sets = fixture_sets();
  auto solo = decltype(sets){{"rater_a", sets.at("rater_a")}};
  CHECK_THROWS_MATCHES(rating_matrix(solo), Error, ErrorCodeIs(Errc::TooFewRaters));

  sets["rater_b"].erase(2);
  CHECK_THROWS_MATCHES(rating_matrix(sets), Error, ErrorCodeIs(Errc::CoverageMismatch));
}

TEST_CASE("the agreement report carries kappa and the marginals") {
  IrrReport r = irr_report(fixture_sets());
  CHECK_THAT(r.kappa, WithinAbs(1.0 / 3.0, 1e-12));
  CHECK(r.N == 3);
  CHECK(r.n == 2);
  CHECK(r.k == 2);
  REQUIRE(r.per_category_marginals.size() == 2);
  CHECK_THAT(r.per_category_marginals.at("Challenge|Neutral"), WithinAbs(0.5, 1e-12));
  CHECK_THAT(r.per_category_marginals.at("Failure|Neutral"), WithinAbs(0.5, 1e-12));
}
