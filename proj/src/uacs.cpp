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

#include "docparse/uacs.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "docparse/edit_distance.hpp"

namespace docparse {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

ClusterAssignment kmeans(const EmbeddingSet& embeddings, size_t k, uint64_t seed,
                         size_t max_iter) {
  const size_t m = embeddings.size();
  const size_t dim = embeddings.dim();
  if (k == 0) throw std::invalid_argument("k must be positive");
  if (k > m) throw std::invalid_argument("k exceeds sample count");
  for (const auto& v : embeddings.vectors) {
    if (v.size() != dim) throw std::invalid_argument("embedding vectors have mixed dimensions");
    for (double x : v) {
      if (!std::isfinite(x)) throw std::invalid_argument("non-finite embedding entry");
    }
  }

  std::mt19937_64 rng(seed);
  const auto& pts = embeddings.vectors;

  // k-means++ initialization.
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  {
    std::uniform_int_distribution<size_t> pick(0, m - 1);
    centroids.push_back(pts[pick(rng)]);
    std::vector<double> d2(m);
    while (centroids.size() < k) {
      double total = 0.0;
      for (size_t i = 0; i < m; ++i) {
        double best = std::numeric_limits<double>::max();
        for (const auto& c : centroids) best = std::min(best, sq_dist(pts[i], c));
        d2[i] = best;
        total += best;
      }
      size_t chosen = 0;
      if (total > 0.0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double r = u(rng);
        for (size_t i = 0; i < m; ++i) {
          r -= d2[i];
          if (r <= 0.0) {
            chosen = i;
            break;
          }
        }
      } else {
        // All points coincide with existing centroids; pick the first
        // not already used.
        chosen = centroids.size() % m;
      }
      centroids.push_back(pts[chosen]);
    }
  }

  std::vector<size_t> labels(m, 0);
  double inertia = 0.0;
  for (size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = iter == 0;
    inertia = 0.0;
    for (size_t i = 0; i < m; ++i) {
      size_t best = 0;
      double best_d = std::numeric_limits<double>::max();
      for (size_t c = 0; c < k; ++c) {
        const double d = sq_dist(pts[i], centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[i] != best) changed = true;
      labels[i] = best;
      inertia += best_d;
    }
    if (!changed && iter > 0) break;

    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<size_t> counts(k, 0);
    for (size_t i = 0; i < m; ++i) {
      for (size_t d = 0; d < dim; ++d) sums[labels[i]][d] += pts[i][d];
      ++counts[labels[i]];
    }
    for (size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Empty cluster: reseed from the point farthest from its centroid.
        size_t farthest = 0;
        double far_d = -1.0;
        for (size_t i = 0; i < m; ++i) {
          const double d = sq_dist(pts[i], centroids[labels[i]]);
          if (d > far_d) {
            far_d = d;
            farthest = i;
          }
        }
        centroids[c] = pts[farthest];
        labels[farthest] = c;
        changed = true;
        continue;
      }
      for (size_t d = 0; d < dim; ++d) centroids[c][d] = sums[c][d] / counts[c];
    }
    if (!changed) break;
  }

  // Final inertia against the final centroids.
  inertia = 0.0;
  for (size_t i = 0; i < m; ++i) inertia += sq_dist(pts[i], centroids[labels[i]]);

  ClusterAssignment out;
  out.centroids = std::move(centroids);
  out.labels = std::move(labels);
  out.inertia = inertia;
  return out;
}

double rollout_divergence(const std::vector<std::string>& rollouts) {
  if (rollouts.size() < 2) throw std::invalid_argument("at least 2 rollouts required");
  double sum = 0.0;
  size_t pairs = 0;
  for (size_t i = 0; i < rollouts.size(); ++i) {
    for (size_t j = i + 1; j < rollouts.size(); ++j) {
      sum += normalized_edit_distance(rollouts[i], rollouts[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

UncertaintyScore rollout_uncertainty(const std::map<size_t, std::vector<std::string>>& rollouts,
                                     const ClusterAssignment& clusters) {
  UncertaintyScore score;
  score.per_cluster.assign(clusters.k(), 0.0);
  std::vector<size_t> counts(clusters.k(), 0);
  for (const auto& [sample, outs] : rollouts) {
    if (sample >= clusters.labels.size()) {
      throw std::invalid_argument("rollout sample index " + std::to_string(sample) +
                                  " outside the clustered set");
    }
    score.rollout_count = std::max(score.rollout_count, outs.size());
    const size_t c = clusters.labels[sample];
    score.per_cluster[c] += rollout_divergence(outs);
    ++counts[c];
  }
  for (size_t c = 0; c < clusters.k(); ++c) {
    if (counts[c] > 0) score.per_cluster[c] /= static_cast<double>(counts[c]);
  }
  return score;
}

SamplingPlan allocate(const UncertaintyScore& scores, const std::vector<size_t>& sizes,
                      size_t budget, double alpha, double beta, bool redistribute) {
  if (alpha < 0.0 || beta < 0.0) throw std::invalid_argument("alpha and beta must be >= 0");
  const size_t k = scores.per_cluster.size();
  if (sizes.size() != k) throw std::invalid_argument("sizes/scores length mismatch");

  std::vector<double> weights(k, 0.0);
  double denom = 0.0;
  for (size_t i = 0; i < k; ++i) {
    const double s = scores.per_cluster[i];
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("invalid uncertainty score");
    weights[i] = std::pow(s + alpha, beta);
    denom += weights[i];
  }
  if (k > 0 && denom <= 0.0) {
    throw std::domain_error("degenerate denominator: all (S_j + alpha)^beta are zero");
  }

  SamplingPlan plan;
  plan.cluster_sizes = sizes;
  plan.budget = budget;
  plan.alpha = alpha;
  plan.beta = beta;
  plan.allocations.assign(k, 0);
  size_t used = 0;
  for (size_t i = 0; i < k; ++i) {
    const double share = weights[i] / denom * static_cast<double>(budget);
    const size_t n = std::min(static_cast<size_t>(std::floor(share)), sizes[i]);
    plan.allocations[i] = n;
    used += n;
  }

  if (redistribute && used < budget) {
    std::vector<size_t> order(k);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return weights[a] > weights[b]; });
    bool progress = true;
    while (used < budget && progress) {
      progress = false;
      for (size_t i : order) {
        if (used >= budget) break;
        if (plan.allocations[i] < sizes[i]) {
          ++plan.allocations[i];
          ++used;
          progress = true;
        }
      }
    }
  }
  return plan;
}

std::vector<std::string> flag_unstable(const std::map<std::string, size_t>& detections_low,
                                       const std::map<std::string, size_t>& detections_high,
                                       size_t delta, std::vector<std::string>* warnings) {
  if (detections_low.size() != detections_high.size()) {
    throw std::invalid_argument("dual-threshold id sets differ in size");
  }
  std::vector<std::string> flagged;
  for (const auto& [id, low] : detections_low) {
    const auto it = detections_high.find(id);
    if (it == detections_high.end()) {
      throw std::invalid_argument("sample \"" + id + "\" missing from high-threshold counts");
    }
    const size_t high = it->second;
    if (low < high) {
      if (warnings) {
        warnings->push_back("sample \"" + id + "\": low-threshold count " + std::to_string(low) +
                            " below high-threshold count " + std::to_string(high));
      }
      continue;
    }
    if (low - high >= delta) flagged.push_back(id);
  }
  return flagged;
}

EmbeddingSet load_embeddings(const std::string& matrix_path, const std::string& ids_path) {
  std::ifstream in(matrix_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embeddings file: " + matrix_path);
  uint32_t m = 0, e = 0;
  unsigned char header[8];
  if (!in.read(reinterpret_cast<char*>(header), 8)) {
    throw std::runtime_error("embeddings file too short for header");
  }
  m = header[0] | header[1] << 8 | header[2] << 16 | static_cast<uint32_t>(header[3]) << 24;
  e = header[4] | header[5] << 8 | header[6] << 16 | static_cast<uint32_t>(header[7]) << 24;

  EmbeddingSet set;
  set.vectors.assign(m, std::vector<double>(e, 0.0));
  std::vector<unsigned char> row(static_cast<size_t>(e) * 4);
  for (uint32_t i = 0; i < m; ++i) {
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()))) {
      throw std::runtime_error("embeddings file truncated at row " + std::to_string(i));
    }
    for (uint32_t j = 0; j < e; ++j) {
      uint32_t bits = row[4 * j] | row[4 * j + 1] << 8 | row[4 * j + 2] << 16 |
                      static_cast<uint32_t>(row[4 * j + 3]) << 24;
      float f;
      std::memcpy(&f, &bits, 4);
      set.vectors[i][j] = static_cast<double>(f);
    }
  }

  std::ifstream ids_in(ids_path);
  if (!ids_in) throw std::runtime_error("cannot open embeddings id file: " + ids_path);
  nlohmann::json ids_json;
  try {
    ids_in >> ids_json;
  } catch (const nlohmann::json::exception& err) {
    throw std::runtime_error(std::string("embeddings id JSON parse error: ") + err.what());
  }
  if (!ids_json.is_array()) throw std::runtime_error("embeddings id file must be a JSON array");
  set.ids = ids_json.get<std::vector<std::string>>();
  if (set.ids.size() != m) {
    throw std::runtime_error("embeddings id count does not match matrix rows");
  }
  return set;
}

void save_embeddings(const std::string& matrix_path, const std::string& ids_path,
                     const EmbeddingSet& embeddings) {
  std::ofstream out(matrix_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write embeddings file: " + matrix_path);
  const uint32_t m = static_cast<uint32_t>(embeddings.size());
  const uint32_t e = static_cast<uint32_t>(embeddings.dim());
  unsigned char header[8] = {
      static_cast<unsigned char>(m), static_cast<unsigned char>(m >> 8),
      static_cast<unsigned char>(m >> 16), static_cast<unsigned char>(m >> 24),
      static_cast<unsigned char>(e), static_cast<unsigned char>(e >> 8),
      static_cast<unsigned char>(e >> 16), static_cast<unsigned char>(e >> 24)};
  out.write(reinterpret_cast<const char*>(header), 8);
  for (const auto& row : embeddings.vectors) {
    for (double v : row) {
      const float f = static_cast<float>(v);
      uint32_t bits;
      std::memcpy(&bits, &f, 4);
      unsigned char b[4] = {static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
                            static_cast<unsigned char>(bits >> 16),
                            static_cast<unsigned char>(bits >> 24)};
      out.write(reinterpret_cast<const char*>(b), 4);
    }
  }
  std::ofstream ids_out(ids_path, std::ios::trunc);
  if (!ids_out) throw std::runtime_error("cannot write embeddings id file: " + ids_path);
  ids_out << nlohmann::json(embeddings.ids).dump() << "\n";
}

std::string sampling_plan_to_json(const SamplingPlan& plan, const UncertaintyScore& scores) {
  nlohmann::ordered_json root;
  root["clusters"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < plan.allocations.size(); ++i) {
    root["clusters"].push_back({{"size", plan.cluster_sizes[i]},
                                {"uncertainty", scores.per_cluster[i]},
                                {"allocated", plan.allocations[i]}});
  }
  root["budget"] = plan.budget;
  root["alpha"] = plan.alpha;
  root["beta"] = plan.beta;
  return root.dump(2) + "\n";
}

}  // namespace docparse
