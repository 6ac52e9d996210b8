#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "docparse/uacs.hpp"

using namespace docparse;

namespace {

EmbeddingSet two_blobs(size_t per_blob, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.1);
  EmbeddingSet set;
  for (size_t i = 0; i < per_blob; ++i) {
    set.vectors.push_back({noise(rng), noise(rng)});
    set.ids.push_back("a" + std::to_string(i));
  }
  for (size_t i = 0; i < per_blob; ++i) {
    set.vectors.push_back({10.0 + noise(rng), 10.0 + noise(rng)});
    set.ids.push_back("b" + std::to_string(i));
  }
  return set;
}

}  // namespace

TEST_CASE("k equal to the sample count gives zero inertia") {
  EmbeddingSet set;
  set.vectors = {{0.0, 0.0}, {5.0, 0.0}, {0.0, 5.0}};
  set.ids = {"x", "y", "z"};
  const auto c = kmeans(set, 3, 1);
  CHECK(c.inertia == 0.0);
  // All three labels distinct.
  CHECK(c.labels[0] != c.labels[1]);
  CHECK(c.labels[1] != c.labels[2]);
  CHECK(c.labels[0] != c.labels[2]);
}

TEST_CASE("two separated blobs are split cleanly") {
  const auto set = two_blobs(20, 7);
  const auto c = kmeans(set, 2, 42);
  // Every point in the same blob shares a label.
  for (size_t i = 1; i < 20; ++i) CHECK(c.labels[i] == c.labels[0]);
  for (size_t i = 21; i < 40; ++i) CHECK(c.labels[i] == c.labels[20]);
  CHECK(c.labels[0] != c.labels[20]);
  CHECK(c.inertia < 5.0);
}

TEST_CASE("kmeans is deterministic for a fixed seed") {
  const auto set = two_blobs(15, 3);
  const auto a = kmeans(set, 4, 99);
  const auto b = kmeans(set, 4, 99);
  CHECK(a.labels == b.labels);
  CHECK(a.centroids == b.centroids);
  CHECK(a.inertia == b.inertia);
}

TEST_CASE("kmeans input validation") {
  EmbeddingSet set;
  set.vectors = {{0.0}, {1.0}};
  set.ids = {"a", "b"};
  CHECK_THROWS_AS(kmeans(set, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(kmeans(set, 3, 1), std::invalid_argument);
  set.vectors[1] = {std::nan(""), 0.0};
  CHECK_THROWS_AS(kmeans(set, 1, 1), std::invalid_argument);
}

TEST_CASE("rollout divergence") {
  CHECK(rollout_divergence({"kitten", "sitting"}) == doctest::Approx(3.0 / 7.0));
  CHECK(rollout_divergence({"same", "same", "same"}) == 0.0);
  // Pairs: (ab,ab)=0, (ab,aa)=0.5, (ab,aa)=0.5.
  CHECK(rollout_divergence({"ab", "ab", "aa"}) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(rollout_divergence({"only one"}), std::invalid_argument);
}

TEST_CASE("cluster uncertainty averages sampled items; absent clusters score 0") {
  ClusterAssignment clusters;
  clusters.centroids = {{0.0}, {1.0}, {2.0}};
  clusters.labels = {0, 0, 1, 2};
  std::map<size_t, std::vector<std::string>> rollouts;
  rollouts[0] = {"same", "same"};          // divergence 0
  rollouts[1] = {"kitten", "sitting"};     // divergence 3/7
  rollouts[2] = {"ab", "cd"};              // divergence 1
  const auto score = rollout_uncertainty(rollouts, clusters);
  REQUIRE(score.per_cluster.size() == 3);
  CHECK(score.per_cluster[0] == doctest::Approx(0.5 * (0.0 + 3.0 / 7.0)));
  CHECK(score.per_cluster[1] == doctest::Approx(1.0));
  CHECK(score.per_cluster[2] == 0.0);
  rollouts[9] = {"a", "b"};
  CHECK_THROWS_AS(rollout_uncertainty(rollouts, clusters), std::invalid_argument);
}

TEST_CASE("allocation reference fixture") {
  UncertaintyScore scores;
  scores.per_cluster = {1.0, 3.0};
  const auto plan = allocate(scores, {100, 100}, 10);
  CHECK(plan.allocations == std::vector<size_t>{2, 8});
}

TEST_CASE("allocation caps at cluster sizes") {
  UncertaintyScore scores;
  scores.per_cluster = {1.0, 3.0};
  const auto plan = allocate(scores, {1, 8}, 10);
  CHECK(plan.allocations == std::vector<size_t>{1, 8});
}

TEST_CASE("beta 0 splits the budget uniformly") {
  UncertaintyScore scores;
  scores.per_cluster = {0.0, 5.0, 1.0, 2.0};
  const auto plan = allocate(scores, {100, 100, 100, 100}, 12, 1.0, 0.0);
  CHECK(plan.allocations == std::vector<size_t>{3, 3, 3, 3});
}

TEST_CASE("floor surplus stays unspent unless redistribution is requested") {
  UncertaintyScore scores;
  scores.per_cluster = {1.0, 3.0};
  const auto kept = allocate(scores, {100, 100}, 11);
  CHECK(kept.allocations == std::vector<size_t>{2, 8});  // floors of 2.2 and 8.8
  const auto spread = allocate(scores, {100, 100}, 11, 1.0, 2.0, true);
  CHECK(spread.allocations == std::vector<size_t>{2, 9});  // highest weight first
}

TEST_CASE("degenerate denominator is an error") {
  UncertaintyScore scores;
  scores.per_cluster = {0.0, 0.0};
  CHECK_THROWS_AS(allocate(scores, {10, 10}, 5, 0.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(allocate(scores, {10}, 5), std::invalid_argument);  // length mismatch
}

TEST_CASE("allocation properties on random inputs") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<size_t> size_dist(1, 50);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t k = 1 + rng() % 6;
    UncertaintyScore scores;
    std::vector<size_t> sizes;
    for (size_t i = 0; i < k; ++i) {
      scores.per_cluster.push_back(u(rng));
      sizes.push_back(size_dist(rng));
    }
    const size_t budget = rng() % 40;
    const auto plan = allocate(scores, sizes, budget);
    size_t total = 0;
    double denom = 0.0;
    for (size_t i = 0; i < k; ++i) denom += std::pow(scores.per_cluster[i] + 1.0, 2.0);
    for (size_t i = 0; i < k; ++i) {
      const double share = std::pow(scores.per_cluster[i] + 1.0, 2.0) / denom *
                           static_cast<double>(budget);
      const size_t expected = std::min(static_cast<size_t>(std::floor(share)), sizes[i]);
      CHECK(plan.allocations[i] == expected);
      CHECK(plan.allocations[i] <= sizes[i]);
      total += plan.allocations[i];
    }
    CHECK(total <= budget);
  }
}

TEST_CASE("raising a cluster's uncertainty never lowers its allocation") {
  UncertaintyScore low, high;
  low.per_cluster = {0.4, 0.7, 0.2};
  high.per_cluster = {0.9, 0.7, 0.2};
  const auto a = allocate(low, {50, 50, 50}, 20);
  const auto b = allocate(high, {50, 50, 50}, 20);
  CHECK(b.allocations[0] >= a.allocations[0]);
}

TEST_CASE("dual-threshold mining") {
  std::map<std::string, size_t> low = {{"p1", 12}, {"p2", 4}, {"p3", 3}};
  std::map<std::string, size_t> high = {{"p1", 3}, {"p2", 4}, {"p3", 5}};
  std::vector<std::string> warnings;
  const auto flagged = flag_unstable(low, high, 5, &warnings);
  CHECK(flagged == std::vector<std::string>{"p1"});
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("p3") != std::string::npos);

  std::map<std::string, size_t> other = {{"p1", 3}, {"p2", 4}, {"qq", 5}};
  CHECK_THROWS_AS(flag_unstable(low, other, 5), std::invalid_argument);
}

TEST_CASE("delta zero flags every non-negative discrepancy") {
  std::map<std::string, size_t> low = {{"a", 4}};
  std::map<std::string, size_t> high = {{"a", 4}};
  CHECK(flag_unstable(low, high, 0) == std::vector<std::string>{"a"});
  CHECK(flag_unstable(low, high, 1).empty());
}

TEST_CASE("embeddings binary roundtrip") {
  EmbeddingSet set;
  set.vectors = {{1.5, -2.25, 0.0}, {3.0, 4.5, -6.75}};
  set.ids = {"s0", "s1"};
  const std::string matrix = "test_uacs_emb.bin";
  const std::string ids = "test_uacs_emb.ids.json";
  save_embeddings(matrix, ids, set);
  const auto back = load_embeddings(matrix, ids);
  std::remove(matrix.c_str());
  std::remove(ids.c_str());
  CHECK(back.vectors == set.vectors);
  CHECK(back.ids == set.ids);
  CHECK_THROWS_AS(load_embeddings("no_such.bin", "no_such.json"), std::runtime_error);
}

TEST_CASE("sampling plan serialization") {
  UncertaintyScore scores;
  scores.per_cluster = {1.0, 3.0};
  const auto plan = allocate(scores, {100, 100}, 10);
  const std::string json = sampling_plan_to_json(plan, scores);
  CHECK(json.find("\"clusters\"") != std::string::npos);
  CHECK(json.find("\"allocated\": 8") != std::string::npos);
  CHECK(json.find("\"budget\": 10") != std::string::npos);
}
