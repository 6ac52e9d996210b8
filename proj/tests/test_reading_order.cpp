#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "docparse/reading_order.hpp"

using namespace docparse;

namespace {

QuerySet random_queries(std::mt19937_64& rng, size_t n, size_t d) {
  std::normal_distribution<double> dist;
  QuerySet qs;
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> q(d);
    for (auto& v : q) v = dist(rng);
    qs.queries.push_back(std::move(q));
  }
  return qs;
}

ProjectionWeights random_weights(std::mt19937_64& rng, size_t d, size_t dh) {
  std::normal_distribution<double> dist;
  ProjectionWeights w;
  w.w_q.assign(d, std::vector<double>(dh));
  w.w_k.assign(d, std::vector<double>(dh));
  for (auto& row : w.w_q)
    for (auto& v : row) v = dist(rng);
  for (auto& row : w.w_k)
    for (auto& v : row) v = dist(rng);
  return w;
}

}  // namespace

TEST_CASE("single query gives the 1x1 zero matrix") {
  std::mt19937_64 rng(1);
  const auto s = score_relations(random_queries(rng, 1, 4), random_weights(rng, 4, 4));
  REQUIRE(s.size() == 1);
  CHECK(s.s[0][0] == 0.0);
}

TEST_CASE("hand-evaluated pairwise score") {
  // d = 2, d_h = 2, W_q = I, W_k = [[0,1],[0,0]], q_0 = (1,0), q_1 = (0,2).
  // Projections are row-vector products: k_0 = (0,1), k_1 = (0,0), so
  // f(q_0,q_1) = q_0 . k_1 = 0 and f(q_1,q_0) = q_1 . k_0 = 2, giving
  // S[0][1] = (0 - 2)/sqrt(2).
  QuerySet qs;
  qs.queries = {{1.0, 0.0}, {0.0, 2.0}};
  ProjectionWeights w;
  w.w_q = {{1.0, 0.0}, {0.0, 1.0}};
  w.w_k = {{0.0, 1.0}, {0.0, 0.0}};
  const auto s = score_relations(qs, w);
  CHECK(s.s[0][1] == doctest::Approx(-2.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s.s[1][0] == -s.s[0][1]);
}

TEST_CASE("anti-symmetry is exact on random inputs") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 1 + rng() % 16;
    const size_t d = 1 + rng() % 8;
    const size_t dh = 1 + rng() % 8;
    const auto s = score_relations(random_queries(rng, n, d), random_weights(rng, d, dh));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        CHECK(s.s[i][j] + s.s[j][i] == 0.0);  // exact, not approximate
      }
    }
  }
}

TEST_CASE("dimension mismatch and non-finite inputs are rejected") {
  std::mt19937_64 rng(7);
  auto qs = random_queries(rng, 3, 4);
  CHECK_THROWS_AS(score_relations(qs, random_weights(rng, 5, 4)), std::invalid_argument);
  qs.queries[1][2] = std::nan("");
  CHECK_THROWS_AS(score_relations(qs, random_weights(rng, 4, 4)), std::invalid_argument);
}

TEST_CASE("vote reproduces the hand-computed three-element example") {
  // True order 2 -> 0 -> 1 with margin 2: V = (1.0, 1.7616, 0.2384).
  const auto m = order_from_margin_matrix({2, 0, 1}, 2.0);
  const auto order = vote(m);
  const double sig2 = 1.0 / (1.0 + std::exp(-2.0));
  CHECK(order.votes[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(order.votes[1] == doctest::Approx(2.0 * sig2).epsilon(1e-9));
  CHECK(order.votes[2] == doctest::Approx(2.0 * (1.0 - sig2)).epsilon(1e-9));
  CHECK(order.ranks == std::vector<size_t>{2, 0, 1});
}

TEST_CASE("vote on a single element") {
  RelationMatrix m;
  m.s = {{0.0}};
  const auto order = vote(m);
  CHECK(order.ranks == std::vector<size_t>{0});
  CHECK(order.votes[0] == 0.0);
}

TEST_CASE("all-zero scores tie-break by ascending index") {
  RelationMatrix m;
  m.s.assign(4, std::vector<double>(4, 0.0));
  const auto order = vote(m);
  for (double v : order.votes) CHECK(v == doctest::Approx(1.5));
  CHECK(order.ranks == std::vector<size_t>{0, 1, 2, 3});
}

TEST_CASE("margin matrix fixtures") {
  const auto identity = order_from_margin_matrix({0, 1}, 1.0);
  CHECK(identity.s == std::vector<std::vector<double>>{{0.0, 1.0}, {-1.0, 0.0}});
  const auto swapped = order_from_margin_matrix({1, 0}, 3.0);
  CHECK(swapped.s == std::vector<std::vector<double>>{{0.0, -3.0}, {3.0, 0.0}});
  CHECK_THROWS_AS(order_from_margin_matrix({0, 0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(order_from_margin_matrix({0, 1}, 0.0), std::invalid_argument);
}

TEST_CASE("vote recovers every permutation for N <= 6") {
  for (size_t n = 1; n <= 6; ++n) {
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), size_t{0});
    do {
      const auto order = vote(order_from_margin_matrix(perm, 1.5));
      CHECK(order.ranks == perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("positive scaling preserves ranks but not votes") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const size_t n = 2 + rng() % 5;
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    auto m = order_from_margin_matrix(perm, 1.0);
    const auto base = vote(m);
    for (auto& row : m.s)
      for (auto& v : row) v *= 3.5;
    const auto scaled = vote(m);
    CHECK(scaled.ranks == base.ranks);
  }
}

TEST_CASE("relabeling queries permutes ranks consistently") {
  std::mt19937_64 rng(13);
  const size_t n = 5, d = 3, dh = 4;
  auto qs = random_queries(rng, n, d);
  const auto w = random_weights(rng, d, dh);
  const auto base = vote(score_relations(qs, w));
  // Swap queries 1 and 3.
  std::swap(qs.queries[1], qs.queries[3]);
  const auto swapped = vote(score_relations(qs, w));
  auto relabel = [](size_t i) { return i == 1 ? size_t{3} : i == 3 ? size_t{1} : i; };
  for (size_t k = 0; k < n; ++k) CHECK(swapped.ranks[k] == relabel(base.ranks[k]));
}

TEST_CASE("asymmetric external matrices are symmetrized with a warning") {
  RelationMatrix m;
  m.s = {{0.0, 1.0}, {-0.5, 0.0}};  // asymmetry 0.5
  std::vector<std::string> warnings;
  const auto order = vote(m, &warnings);
  REQUIRE(warnings.size() == 1);
  // Corrected S[0][1] = 0.5*(1 - (-0.5)) = 0.75 > 0: element 0 precedes 1.
  CHECK(order.ranks == std::vector<size_t>{0, 1});
}

TEST_CASE("logistic is safe for extreme arguments") {
  CHECK(logistic(800.0) == 1.0);
  CHECK(logistic(-800.0) == 0.0);
  CHECK(logistic(0.0) == 0.5);
}

TEST_CASE("relation matrix JSON roundtrip") {
  const auto m = order_from_margin_matrix({1, 0, 2}, 2.0);
  const auto back = relation_matrix_from_json(relation_matrix_to_json(m));
  CHECK(back.s == m.s);
  CHECK_THROWS_AS(relation_matrix_from_json("{\"n\": 2, \"s\": [[0]]}"), std::runtime_error);
}
