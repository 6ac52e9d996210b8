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

#include "docparse/reading_order.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace docparse {

double logistic(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

std::vector<double> project(const std::vector<std::vector<double>>& w,
                            const std::vector<double>& q) {
  const size_t d = w.size();
  const size_t dh = w.front().size();
  std::vector<double> out(dh, 0.0);
  for (size_t r = 0; r < d; ++r) {
    const double qr = q[r];
    for (size_t c = 0; c < dh; ++c) out[c] += w[r][c] * qr;
  }
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_finite(const std::vector<std::vector<double>>& rows, const char* what) {
  for (const auto& row : rows) {
    for (double v : row) {
      if (!std::isfinite(v)) throw std::invalid_argument(std::string("non-finite ") + what);
    }
  }
}

}  // namespace

RelationMatrix score_relations(const QuerySet& queries, const ProjectionWeights& weights) {
  const size_t n = queries.size();
  const size_t d = queries.dim();
  const size_t dh = weights.hidden_dim();
  if (weights.in_dim() != d || weights.w_k.size() != d) {
    throw std::invalid_argument("projection weights do not match query dimension");
  }
  if (dh == 0 && n > 0) throw std::invalid_argument("hidden dimension must be positive");
  for (const auto& q : queries.queries) {
    if (q.size() != d) throw std::invalid_argument("query vectors have mixed dimensions");
  }
  for (const auto& row : weights.w_k) {
    if (row.size() != dh) throw std::invalid_argument("W_k rows have mixed dimensions");
  }
  for (const auto& row : weights.w_q) {
    if (row.size() != dh) throw std::invalid_argument("W_q rows have mixed dimensions");
  }
  check_finite(queries.queries, "query entry");
  check_finite(weights.w_q, "W_q entry");
  check_finite(weights.w_k, "W_k entry");

  std::vector<std::vector<double>> proj_q(n), proj_k(n);
  for (size_t i = 0; i < n; ++i) {
    proj_q[i] = project(weights.w_q, queries.queries[i]);
    proj_k[i] = project(weights.w_k, queries.queries[i]);
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  RelationMatrix m;
  m.s.assign(n, std::vector<double>(n, 0.0));
  // f(q_i, q_j) computed once per ordered pair; the difference is negated
  // for the mirror entry so S + S^T is exactly zero.
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double fij = dot(proj_q[i], proj_k[j]);
      const double fji = dot(proj_q[j], proj_k[i]);
      const double s = (fij - fji) * scale;
      m.s[i][j] = s;
      m.s[j][i] = -s;
    }
  }
  return m;
}

ReadingOrder vote(const RelationMatrix& relations, std::vector<std::string>* warnings) {
  const size_t n = relations.size();
  for (const auto& row : relations.s) {
    if (row.size() != n) throw std::invalid_argument("relation matrix is not square");
  }
  check_finite(relations.s, "relation score");

  // Symmetrize: tolerate serialization noise in externally loaded matrices.
  std::vector<std::vector<double>> s(n, std::vector<double>(n, 0.0));
  double max_correction = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      s[i][j] = 0.5 * (relations.s[i][j] - relations.s[j][i]);
      max_correction = std::max(max_correction, std::abs(s[i][j] - relations.s[i][j]));
    }
  }
  if (max_correction > 1e-6 && warnings) {
    warnings->push_back("relation matrix anti-symmetry corrected by " +
                        std::to_string(max_correction));
  }

  ReadingOrder order;
  order.votes.assign(n, 0.0);
  for (size_t j = 0; j < n; ++j) {
    double v = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (i != j) v += logistic(s[i][j]);
    }
    order.votes[j] = v;
  }
  order.ranks.resize(n);
  std::iota(order.ranks.begin(), order.ranks.end(), size_t{0});
  std::stable_sort(order.ranks.begin(), order.ranks.end(),
                   [&](size_t a, size_t b) { return order.votes[a] < order.votes[b]; });
  return order;
}

RelationMatrix order_from_margin_matrix(const std::vector<size_t>& true_perm, double margin) {
  if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
  const size_t n = true_perm.size();
  std::vector<size_t> position(n, n);
  for (size_t k = 0; k < n; ++k) {
    if (true_perm[k] >= n || position[true_perm[k]] != n) {
      throw std::invalid_argument("true_perm is not a valid permutation");
    }
    position[true_perm[k]] = k;
  }
  RelationMatrix m;
  m.s.assign(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      m.s[i][j] = position[i] < position[j] ? margin : -margin;
    }
  }
  return m;
}

RelationMatrix relation_matrix_from_json(const std::string& json_text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("relation matrix JSON parse error: ") + e.what());
  }
  if (!root.is_object() || !root.contains("n") || !root.contains("s")) {
    throw std::runtime_error("relation matrix JSON must contain \"n\" and \"s\"");
  }
  const size_t n = root.at("n").get<size_t>();
  RelationMatrix m;
  m.s = root.at("s").get<std::vector<std::vector<double>>>();
  if (m.s.size() != n) throw std::runtime_error("relation matrix row count does not match n");
  for (const auto& row : m.s) {
    if (row.size() != n) throw std::runtime_error("relation matrix is not square");
  }
  return m;
}

std::string relation_matrix_to_json(const RelationMatrix& m) {
  nlohmann::ordered_json root;
  root["n"] = m.size();
  root["s"] = m.s;
  return root.dump();
}

}  // namespace docparse
