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

#include <optional>
#include <string>
#include <vector>

#include "docparse/core.hpp"
#include "docparse/spotting.hpp"

namespace docparse {

struct MatchPair {
  size_t pred_index = 0;
  size_t gt_index = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<size_t> unmatched_pred;
  std::vector<size_t> unmatched_gt;
};

struct MetricWeights {
  double text = 1.0 / 3.0;
  double formula = 1.0 / 3.0;
  double table = 1.0 / 3.0;
};

struct MetricReport {
  double text_edit = 0.0;
  double formula_proxy = 1.0;  // token-level similarity, not CDM
  double table_teds = 1.0;
  double table_teds_s = 1.0;
  double reading_order_edit = 0.0;
  double overall = 100.0;
  double spotting_accuracy = 1.0;
  double seal_ned = 0.0;
  bool table_teds_approximate = false;
};

struct PageMetrics {
  int64_t page_index = 0;
  MetricReport report;
};

/// Greedy one-to-one IoU matching, descending IoU, pairs kept at or above
/// the threshold. Deterministic: ties broken by (pred index, gt index).
MatchResult greedy_iou_match(const std::vector<Polygon>& pred, const std::vector<Polygon>& gt,
                             double iou_threshold, std::vector<std::string>* warnings = nullptr);

/// Reading-order score: predictions are matched to GT elements by IoU, the
/// GT-ordered id sequence is compared against the prediction-ordered
/// sequence of matched ids by normalized edit distance. 0 is perfect.
/// Decorative categories are skipped when exclude_decorative is set.
double reading_order_edit(const PageDocument& pred, const PageDocument& gt,
                          double iou_threshold = 0.5, bool exclude_decorative = true);

/// Greedy IoU matching over quads; matched pair score = 1 - normalized edit
/// distance of the texts; accuracy = sum of scores / max(|pred|,|gt|).
double spotting_accuracy(const std::vector<TextInstance>& pred,
                         const std::vector<TextInstance>& gt, double iou_threshold,
                         MatchResult* match = nullptr);

/// Normalized edit distance over Unicode scalars (lower is better).
double seal_ned(const std::string& pred, const std::string& gt);

/// LaTeX tokens: commands (\name or \<symbol>), braces, and single atoms.
std::vector<std::string> latex_tokens(const std::string& source);

/// Token-level normalized edit similarity over a LaTeX tokenization.
/// This is NOT the CDM metric; reports label it formula_proxy.
double formula_proxy(const std::string& pred, const std::string& gt);

/// overall = 100 * (w_text*(1 - text_edit) + w_formula*formula_proxy
///                  + w_table*table_teds). Weights must sum to 1 (1e-9).
double overall_score(double text_edit, double formula_proxy_score, double table_teds,
                     const MetricWeights& weights = {});

struct EvalOptions {
  double iou_threshold = 0.5;
  MetricWeights weights;
  bool exclude_decorative_from_order = true;
};

/// Full document evaluation: elements matched per page by IoU, each content
/// modality scored by its metric, page scores averaged with stable order.
MetricReport evaluate_documents(const std::vector<PageDocument>& pred,
                                const std::vector<PageDocument>& gt, const EvalOptions& options,
                                std::vector<PageMetrics>* per_page = nullptr);

std::string report_to_json(const MetricReport& report, const std::vector<PageMetrics>& per_page);

/// Aligned-columns text table with the benchmark header names
/// (Overall, Text^Edit, Table^TEDS, Table^TEDS-S, Reading Order^Edit).
std::string report_to_table(const MetricReport& report);

}  // namespace docparse
