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

#include "docparse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "docparse/edit_distance.hpp"
#include "docparse/geometry.hpp"
#include "docparse/table_tree.hpp"

namespace docparse {

MatchResult greedy_iou_match(const std::vector<Polygon>& pred, const std::vector<Polygon>& gt,
                             double iou_threshold, std::vector<std::string>* warnings) {
  struct Candidate {
    double iou;
    size_t pi;
    size_t gi;
  };
  std::vector<Candidate> candidates;
  for (size_t pi = 0; pi < pred.size(); ++pi) {
    for (size_t gi = 0; gi < gt.size(); ++gi) {
      double iou = 0.0;
      try {
        iou = polygon_iou(pred[pi], gt[gi], warnings);
      } catch (const std::exception& e) {
        if (warnings) {
          warnings->push_back("iou(" + std::to_string(pi) + "," + std::to_string(gi) +
                              ") skipped: " + e.what());
        }
        continue;
      }
      if (iou >= iou_threshold) candidates.push_back({iou, pi, gi});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.pi != b.pi) return a.pi < b.pi;
    return a.gi < b.gi;
  });

  MatchResult result;
  std::vector<bool> pred_used(pred.size(), false), gt_used(gt.size(), false);
  for (const auto& c : candidates) {
    if (pred_used[c.pi] || gt_used[c.gi]) continue;
    pred_used[c.pi] = true;
    gt_used[c.gi] = true;
    result.pairs.push_back({c.pi, c.gi, c.iou});
  }
  for (size_t i = 0; i < pred.size(); ++i) {
    if (!pred_used[i]) result.unmatched_pred.push_back(i);
  }
  for (size_t i = 0; i < gt.size(); ++i) {
    if (!gt_used[i]) result.unmatched_gt.push_back(i);
  }
  return result;
}

double reading_order_edit(const PageDocument& pred, const PageDocument& gt, double iou_threshold,
                          bool exclude_decorative) {
  std::vector<size_t> gt_keep, pred_keep;
  for (size_t i = 0; i < gt.elements.size(); ++i) {
    if (!exclude_decorative || !is_decorative(gt.elements[i].category)) gt_keep.push_back(i);
  }
  for (size_t i = 0; i < pred.elements.size(); ++i) {
    if (!exclude_decorative || !is_decorative(pred.elements[i].category)) pred_keep.push_back(i);
  }
  if (gt_keep.empty() && pred_keep.empty()) return 0.0;

  std::vector<Polygon> pred_polys, gt_polys;
  for (size_t i : pred_keep) pred_polys.push_back(pred.elements[i].polygon);
  for (size_t i : gt_keep) gt_polys.push_back(gt.elements[i].polygon);
  const MatchResult match = greedy_iou_match(pred_polys, gt_polys, iou_threshold);

  // Symbol per GT element (its index within gt_keep). The GT sequence lists
  // all GT elements in GT order; the prediction sequence lists matched GT
  // symbols in prediction order.
  std::vector<size_t> gt_symbol_of_pred(pred_keep.size(), SIZE_MAX);
  for (const auto& pair : match.pairs) gt_symbol_of_pred[pair.pred_index] = pair.gt_index;

  std::vector<size_t> gt_order(gt_keep.size());
  for (size_t s = 0; s < gt_keep.size(); ++s) gt_order[s] = s;
  std::stable_sort(gt_order.begin(), gt_order.end(), [&](size_t a, size_t b) {
    return gt.elements[gt_keep[a]].order < gt.elements[gt_keep[b]].order;
  });

  std::vector<size_t> pred_order(pred_keep.size());
  for (size_t s = 0; s < pred_keep.size(); ++s) pred_order[s] = s;
  std::stable_sort(pred_order.begin(), pred_order.end(), [&](size_t a, size_t b) {
    return pred.elements[pred_keep[a]].order < pred.elements[pred_keep[b]].order;
  });

  std::vector<size_t> gt_seq = gt_order;
  std::vector<size_t> pred_seq;
  for (size_t s : pred_order) {
    if (gt_symbol_of_pred[s] != SIZE_MAX) pred_seq.push_back(gt_symbol_of_pred[s]);
  }
  return normalized_edit_distance_seq(pred_seq, gt_seq);
}

double spotting_accuracy(const std::vector<TextInstance>& pred,
                         const std::vector<TextInstance>& gt, double iou_threshold,
                         MatchResult* match) {
  auto quad_polygon = [](const GridQuad& q) {
    Polygon p;
    for (const auto& v : q.v) p.points.push_back({static_cast<double>(v[0]), static_cast<double>(v[1])});
    return p;
  };
  std::vector<Polygon> pred_polys, gt_polys;
  pred_polys.reserve(pred.size());
  gt_polys.reserve(gt.size());
  for (const auto& t : pred) pred_polys.push_back(quad_polygon(t.quad));
  for (const auto& t : gt) gt_polys.push_back(quad_polygon(t.quad));

  const MatchResult m = greedy_iou_match(pred_polys, gt_polys, iou_threshold);
  double total = 0.0;
  for (const auto& pair : m.pairs) {
    total += 1.0 - normalized_edit_distance(pred[pair.pred_index].text, gt[pair.gt_index].text);
  }
  if (match) *match = m;
  const size_t denom = std::max(pred.size(), gt.size());
  if (denom == 0) return 1.0;
  return total / static_cast<double>(denom);
}

double seal_ned(const std::string& pred, const std::string& gt) {
  return normalized_edit_distance(pred, gt);
}

std::vector<std::string> latex_tokens(const std::string& source) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < source.size()) {
    const char c = source[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '\\') {
      size_t j = i + 1;
      while (j < source.size() && std::isalpha(static_cast<unsigned char>(source[j]))) ++j;
      if (j == i + 1 && j < source.size()) ++j;  // \<symbol>
      tokens.push_back(source.substr(i, j - i));
      i = j;
      continue;
    }
    // Multi-byte UTF-8 sequences stay one token.
    size_t len = 1;
    const unsigned char uc = static_cast<unsigned char>(c);
    if ((uc & 0xE0) == 0xC0) len = 2;
    else if ((uc & 0xF0) == 0xE0) len = 3;
    else if ((uc & 0xF8) == 0xF0) len = 4;
    len = std::min(len, source.size() - i);
    tokens.push_back(source.substr(i, len));
    i += len;
  }
  return tokens;
}

double formula_proxy(const std::string& pred, const std::string& gt) {
  const auto tp = latex_tokens(pred);
  const auto tg = latex_tokens(gt);
  return 1.0 - normalized_edit_distance_seq(tp, tg);
}

double overall_score(double text_edit, double formula_proxy_score, double table_teds,
                     const MetricWeights& weights) {
  const double sum = weights.text + weights.formula + weights.table;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("metric weights must sum to 1");
  }
  return 100.0 * (weights.text * (1.0 - text_edit) + weights.formula * formula_proxy_score +
                  weights.table * table_teds);
}

namespace {

struct Accum {
  double sum = 0.0;
  size_t count = 0;
  void add(double v) {
    sum += v;
    ++count;
  }
  double mean(double if_empty) const {
    return count == 0 ? if_empty : sum / static_cast<double>(count);
  }
};

std::string content_value(const LayoutElement& el) {
  return el.content ? el.content->value : std::string();
}

}  // namespace

MetricReport evaluate_documents(const std::vector<PageDocument>& pred,
                                const std::vector<PageDocument>& gt, const EvalOptions& options,
                                std::vector<PageMetrics>* per_page) {
  std::map<int64_t, const PageDocument*> pred_by_index;
  for (const auto& p : pred) pred_by_index[p.page_index] = &p;

  std::vector<const PageDocument*> gt_sorted;
  for (const auto& g : gt) gt_sorted.push_back(&g);
  std::stable_sort(gt_sorted.begin(), gt_sorted.end(),
                   [](const PageDocument* a, const PageDocument* b) {
                     return a->page_index < b->page_index;
                   });

  Accum text, formula, table, table_s, seal, order;
  bool any_approx = false;
  static const PageDocument kEmptyPage{};

  for (const PageDocument* gt_page : gt_sorted) {
    const auto it = pred_by_index.find(gt_page->page_index);
    const PageDocument& pred_page = it == pred_by_index.end() ? kEmptyPage : *it->second;

    std::vector<Polygon> pred_polys, gt_polys;
    for (const auto& el : pred_page.elements) pred_polys.push_back(el.polygon);
    for (const auto& el : gt_page->elements) gt_polys.push_back(el.polygon);
    const MatchResult match = greedy_iou_match(pred_polys, gt_polys, options.iou_threshold);

    std::vector<const LayoutElement*> pred_of_gt(gt_page->elements.size(), nullptr);
    for (const auto& pair : match.pairs) {
      pred_of_gt[pair.gt_index] = &pred_page.elements[pair.pred_index];
    }

    Accum p_text, p_formula, p_table, p_table_s, p_seal;
    for (size_t gi = 0; gi < gt_page->elements.size(); ++gi) {
      const LayoutElement& gel = gt_page->elements[gi];
      if (!gel.content) continue;
      const LayoutElement* pel = pred_of_gt[gi];
      const std::string pred_value = pel ? content_value(*pel) : std::string();
      switch (gel.content->kind) {
        case ContentKind::PlainText:
        case ContentKind::ChartTable:
          p_text.add(normalized_edit_distance(pred_value, gel.content->value));
          break;
        case ContentKind::FormulaLatex:
          p_formula.add(formula_proxy(pred_value, gel.content->value));
          break;
        case ContentKind::TableHtml: {
          double t = 0.0, ts = 0.0;
          try {
            const TableNode gt_tree = parse_table_html(gel.content->value);
            const TableNode pred_tree = parse_table_html(pred_value);
            bool approx = false;
            t = teds(pred_tree, gt_tree, /*structure_only=*/false, &approx);
            ts = teds(pred_tree, gt_tree, /*structure_only=*/true, &approx);
            any_approx = any_approx || approx;
          } catch (const std::exception&) {
            // Malformed prediction scores zero against a well-formed GT.
            t = 0.0;
            ts = 0.0;
          }
          p_table.add(t);
          p_table_s.add(ts);
          break;
        }
        case ContentKind::SealText:
          p_seal.add(normalized_edit_distance(pred_value, gel.content->value));
          break;
      }
    }

    const double page_order =
        reading_order_edit(pred_page, *gt_page, options.iou_threshold,
                           options.exclude_decorative_from_order);
    order.add(page_order);

    text.sum += p_text.sum;
    text.count += p_text.count;
    formula.sum += p_formula.sum;
    formula.count += p_formula.count;
    table.sum += p_table.sum;
    table.count += p_table.count;
    table_s.sum += p_table_s.sum;
    table_s.count += p_table_s.count;
    seal.sum += p_seal.sum;
    seal.count += p_seal.count;

    if (per_page) {
      MetricReport pr;
      pr.text_edit = p_text.mean(0.0);
      pr.formula_proxy = p_formula.mean(1.0);
      pr.table_teds = p_table.mean(1.0);
      pr.table_teds_s = p_table_s.mean(1.0);
      pr.reading_order_edit = page_order;
      pr.seal_ned = p_seal.mean(0.0);
      pr.overall = overall_score(pr.text_edit, pr.formula_proxy, pr.table_teds, options.weights);
      per_page->push_back({gt_page->page_index, pr});
    }
  }

  MetricReport report;
  report.text_edit = text.mean(0.0);
  report.formula_proxy = formula.mean(1.0);
  report.table_teds = table.mean(1.0);
  report.table_teds_s = table_s.mean(1.0);
  report.reading_order_edit = order.mean(0.0);
  report.seal_ned = seal.mean(0.0);
  report.table_teds_approximate = any_approx;
  report.overall =
      overall_score(report.text_edit, report.formula_proxy, report.table_teds, options.weights);
  return report;
}

namespace {

nlohmann::ordered_json report_json(const MetricReport& r) {
  return {{"overall", r.overall},
          {"text_edit", r.text_edit},
          {"formula_proxy_non_cdm", r.formula_proxy},
          {"table_teds", r.table_teds},
          {"table_teds_s", r.table_teds_s},
          {"reading_order_edit", r.reading_order_edit},
          {"spotting_accuracy", r.spotting_accuracy},
          {"seal_ned", r.seal_ned},
          {"table_teds_approximate", r.table_teds_approximate}};
}

}  // namespace

std::string report_to_json(const MetricReport& report, const std::vector<PageMetrics>& per_page) {
  nlohmann::ordered_json root = report_json(report);
  root["pages"] = nlohmann::ordered_json::array();
  for (const auto& pm : per_page) {
    nlohmann::ordered_json p = report_json(pm.report);
    p["page_index"] = pm.page_index;
    root["pages"].push_back(std::move(p));
  }
  return root.dump(2) + "\n";
}

std::string report_to_table(const MetricReport& r) {
  std::ostringstream out;
  const std::vector<std::pair<std::string, double>> cols = {
      {"Overall", r.overall},
      {"Text^Edit", r.text_edit},
      {"Formula^Proxy(non-CDM)", r.formula_proxy},
      {"Table^TEDS", r.table_teds},
      {"Table^TEDS-S", r.table_teds_s},
      {"Reading Order^Edit", r.reading_order_edit}};
  std::ostringstream header, values;
  for (const auto& [name, value] : cols) {
    std::ostringstream v;
    v.setf(std::ios::fixed);
    v.precision(name == "Overall" ? 2 : 4);
    v << value;
    const size_t width = std::max(name.size(), v.str().size()) + 2;
    header << name << std::string(width - name.size(), ' ');
    values << v.str() << std::string(width - v.str().size(), ' ');
  }
  out << header.str() << "\n" << values.str() << "\n";
  return out.str();
}

}  // namespace docparse
