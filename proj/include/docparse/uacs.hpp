// Copyright 2026 The docparse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace docparse {

struct EmbeddingSet {
  std::vector<std::vector<double>> vectors;  // M rows, dimension e
  std::vector<std::string> ids;              // M sample identifiers

  size_t size() const { return vectors.size(); }
  size_t dim() const { return vectors.empty() ? 0 : vectors.front().size(); }
};

struct ClusterAssignment {
  std::vector<std::vector<double>> centroids;  // K rows
  std::vector<size_t> labels;                  // per sample, in 0..K-1
  double inertia = 0.0;

  size_t k() const { return centroids.size(); }
};

struct UncertaintyScore {
  std::vector<double> per_cluster;  // S_i >= 0
  size_t rollout_count = 0;
};

struct SamplingPlan {
  std::vector<size_t> allocations;  // N_i per cluster
  std::vector<size_t> cluster_sizes;
  size_t budget = 0;
  double alpha = 1.0;
  double beta = 2.0;
};

/// Deterministic seeded k-means: k-means++ initialization, Lloyd iterations
/// until the assignment reaches a fixpoint or max_iter. Empty clusters are
/// repaired by reseeding from the point farthest from its centroid.
/// Throws std::invalid_argument when k == 0 or k > M.
ClusterAssignment kmeans(const EmbeddingSet& embeddings, size_t k, uint64_t seed,
                         size_t max_iter = 100);

/// Per-sample divergence = mean pairwise normalized edit distance across
/// that sample's rollouts; S_i = mean divergence over the cluster's sampled
/// items. rollouts maps sample index -> rollout strings (>= 2 each).
/// Clusters with no sampled items score 0.
UncertaintyScore rollout_uncertainty(const std::map<size_t, std::vector<std::string>>& rollouts,
                                     const ClusterAssignment& clusters);

/// Mean pairwise normalized edit distance of one sample's rollouts.
double rollout_divergence(const std::vector<std::string>& rollouts);

/// Budget allocation: N_i = min(floor((S_i+a)^b / sum_j (S_j+a)^b * N_total), |C_i|).
/// Surplus freed by floors and caps is not redistributed unless redistribute
/// is set (then greedily by descending weight, never exceeding |C_i|).
/// Throws std::domain_error when every (S_j + alpha) is 0 with beta > 0.
SamplingPlan allocate(const UncertaintyScore& scores, const std::vector<size_t>& sizes,
                      size_t budget, double alpha = 1.0, double beta = 2.0,
                      bool redistribute = false);

/// Dual-threshold unstable-case mining: a sample is flagged when its
/// low-threshold detection count exceeds its high-threshold count by at
/// least delta. Negative discrepancies are warned about, never flagged.
/// Throws std::invalid_argument when the id sets differ.
std::vector<std::string> flag_unstable(const std::map<std::string, size_t>& detections_low,
                                       const std::map<std::string, size_t>& detections_high,
                                       size_t delta, std::vector<std::string>* warnings = nullptr);

/// Binary embeddings file: 8-byte header (M: u32 LE, e: u32 LE) followed by
/// M*e little-endian f32 values; ids come from a sidecar JSON array.
EmbeddingSet load_embeddings(const std::string& matrix_path, const std::string& ids_path);
void save_embeddings(const std::string& matrix_path, const std::string& ids_path,
                     const EmbeddingSet& embeddings);

std::string sampling_plan_to_json(const SamplingPlan& plan, const UncertaintyScore& scores);

}  // namespace docparse
