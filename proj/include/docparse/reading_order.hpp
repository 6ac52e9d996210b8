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

#include <cstddef>
#include <string>
#include <vector>

namespace docparse {

/// N query embeddings of uniform dimension d.
struct QuerySet {
  std::vector<std::vector<double>> queries;

  size_t size() const { return queries.size(); }
  size_t dim() const { return queries.empty() ? 0 : queries.front().size(); }
};

/// Projection matrices for the pairwise precedence score. Both are d x d_h,
/// stored row-major (rows index the query dimension).
struct ProjectionWeights {
  std::vector<std::vector<double>> w_q;
  std::vector<std::vector<double>> w_k;

  size_t in_dim() const { return w_q.size(); }
  size_t hidden_dim() const { return w_q.empty() ? 0 : w_q.front().size(); }
};

/// N x N anti-symmetric precedence scores. S[i][j] > 0 means element i
/// precedes element j.
struct RelationMatrix {
  std::vector<std::vector<double>> s;

  size_t size() const { return s.size(); }
};

struct ReadingOrder {
  /// ranks[k] = index of the k-th element to read.
  std::vector<size_t> ranks;
  /// Precedence vote total per element index.
  std::vector<double> votes;
};

/// Numerically safe logistic function (branches on sign to avoid overflow).
double logistic(double x);

/// S[i][j] = (f(q_i,q_j) - f(q_j,q_i)) / sqrt(d_h) with
/// f(q_i,q_j) = (W_q q_i) . (W_k q_j). Anti-symmetry is exact by
/// construction: f is evaluated once per ordered pair and differenced.
/// Throws std::invalid_argument on dimension mismatch or non-finite input.
RelationMatrix score_relations(const QuerySet& queries, const ProjectionWeights& weights);

/// Aggregates votes V_j = sum_{i != j} logistic(S[i][j]) and sorts element
/// indices by ascending vote, ties broken by ascending index. Externally
/// supplied matrices are symmetrized via S <- (S - S^T)/2 first; a warning
/// is emitted when the correction exceeds 1e-6.
ReadingOrder vote(const RelationMatrix& relations, std::vector<std::string>* warnings = nullptr);

/// Builds a margin matrix from a known permutation: S[i][j] = +margin when
/// true_perm reads i before j, -margin otherwise, 0 on the diagonal.
/// true_perm[k] = index of the k-th element in reading order.
RelationMatrix order_from_margin_matrix(const std::vector<size_t>& true_perm, double margin);

/// Matrix exchange format: JSON {"n": int, "s": [[...]]}.
RelationMatrix relation_matrix_from_json(const std::string& json_text);
std::string relation_matrix_to_json(const RelationMatrix& m);

}  // namespace docparse
