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

#include "docparse/assembler.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace docparse {

namespace {

std::string normalize_ws(const std::string& s) {
  std::string out;
  bool in_ws = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_ws = true;
      continue;
    }
    if (in_ws && !out.empty()) out += ' ';
    in_ws = false;
    out += c;
  }
  return out;
}

int table_columns(const std::vector<const TableNode*>& rows) {
  int cols = 0;
  for (const TableNode* row : rows) cols = std::max(cols, effective_columns(*row));
  return cols;
}

std::vector<const TableNode*> row_cells(const TableNode& row) {
  std::vector<const TableNode*> cells;
  for (const auto& c : row.children) {
    if (c.label == "td" || c.label == "th") cells.push_back(&c);
  }
  return cells;
}

bool rows_equal(const TableNode& a, const TableNode& b) {
  const auto ca = row_cells(a);
  const auto cb = row_cells(b);
  if (ca.size() != cb.size()) return false;
  for (size_t i = 0; i < ca.size(); ++i) {
    if (ca[i]->colspan != cb[i]->colspan || ca[i]->rowspan != cb[i]->rowspan) return false;
    if (normalize_ws(ca[i]->text) != normalize_ws(cb[i]->text)) return false;
  }
  return true;
}

// Parent node of the last <tr> in the tree, for appending merged rows.
TableNode* last_row_parent(TableNode& tree) {
  TableNode* found = nullptr;
  std::function<void(TableNode&)> walk = [&](TableNode& node) {
    for (auto& c : node.children) {
      if (c.label == "tr") found = &node;
      walk(c);
    }
  };
  walk(tree);
  return found;
}

}  // namespace

MergeDecision merge_tables(const TableNode& tail, const TableNode& head, TableNode* merged) {
  const auto tail_rows = table_rows(tail);
  const auto head_rows = table_rows(head);
  MergeDecision decision;
  decision.tail_columns = table_columns(tail_rows);
  decision.head_columns = table_columns(head_rows);
  if (tail_rows.empty() || head_rows.empty()) {
    decision.reason = "fragment without rows";
    return decision;
  }
  if (decision.tail_columns != decision.head_columns) {
    decision.reason = "column count mismatch " + std::to_string(decision.tail_columns) +
                      "≠" + std::to_string(decision.head_columns);
    return decision;
  }
  decision.header_duplicated = rows_equal(*tail_rows.front(), *head_rows.front());
  decision.accepted = true;
  decision.reason = decision.header_duplicated ? "columns match, duplicate header dropped"
                                               : "columns match";
  if (merged) {
    *merged = tail;
    TableNode* parent = last_row_parent(*merged);
    const size_t skip = decision.header_duplicated ? 1 : 0;
    for (size_t i = skip; i < head_rows.size(); ++i) parent->children.push_back(*head_rows[i]);
  }
  return decision;
}

int heading_level(Category category, const std::string& text) {
  if (category == Category::DocTitle) return 1;
  if (category != Category::ParagraphTitle) return 0;
  // Dotted numbering prefix: "2", "2.1", "2.1.3" (optional trailing dot),
  // terminated by whitespace.
  size_t i = 0;
  int segments = 0;
  while (i < text.size()) {
    size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) break;
    ++segments;
    if (i < text.size() && text[i] == '.') {
      ++i;
      continue;
    }
    break;
  }
  const bool prefix_ok =
      segments > 0 && (i >= text.size() || std::isspace(static_cast<unsigned char>(text[i])));
  if (!prefix_ok) return 2;
  return std::min(6, 1 + segments);
}

namespace {

ContentKind expected_kind(Category category) {
  switch (category) {
    case Category::Table:
      return ContentKind::TableHtml;
    case Category::DisplayFormula:
    case Category::InlineFormula:
      return ContentKind::FormulaLatex;
    case Category::Seal:
      return ContentKind::SealText;
    case Category::Chart:
      return ContentKind::ChartTable;
    default:
      return ContentKind::PlainText;
  }
}

std::string polygon_provenance(const Polygon& poly) {
  std::ostringstream out;
  out << "[";
  for (size_t i = 0; i < poly.points.size(); ++i) {
    if (i) out << ",";
    out << "[" << poly.points[i].x << "," << poly.points[i].y << "]";
  }
  out << "]";
  return out.str();
}

std::string render_markdown_block(const AssembledBlock& block, const Polygon& polygon) {
  switch (block.category) {
    case Category::DocTitle:
    case Category::ParagraphTitle: {
      const int level = heading_level(block.category, block.value);
      return std::string(static_cast<size_t>(level), '#') + " " + block.value;
    }
    case Category::Image:
    case Category::Chart:
      return "![" + category_to_string(block.category) + "](page_" +
             std::to_string(block.page_index) + " \"polygon: " + polygon_provenance(polygon) +
             "\")";
    default:
      break;
  }
  switch (block.kind) {
    case ContentKind::TableHtml:
      return block.value;
    case ContentKind::FormulaLatex:
      return "$$\n" + block.value + "\n$$";
    default:
      return block.value;
  }
}

}  // namespace

AssembledDocument assemble(const std::vector<PageDocument>& pages, const AssembleOptions& options,
                           std::vector<MergeDecision>* merge_log, Warnings* warnings) {
  std::vector<const PageDocument*> sorted_pages;
  for (const auto& p : pages) sorted_pages.push_back(&p);
  std::stable_sort(sorted_pages.begin(), sorted_pages.end(),
                   [](const PageDocument* a, const PageDocument* b) {
                     return a->page_index < b->page_index;
                   });

  struct WorkBlock {
    AssembledBlock block;
    Polygon polygon;
    bool first_on_page = false;
    bool last_on_page = false;
  };
  std::vector<WorkBlock> blocks;

  for (const PageDocument* page : sorted_pages) {
    std::vector<const LayoutElement*> elements;
    for (const auto& el : page->elements) elements.push_back(&el);
    std::stable_sort(elements.begin(), elements.end(),
                     [](const LayoutElement* a, const LayoutElement* b) {
                       return a->order < b->order;
                     });
    for (size_t i = 0; i < elements.size(); ++i) {
      const LayoutElement& el = *elements[i];
      WorkBlock wb;
      wb.block.category = el.category;
      wb.block.page_index = page->page_index;
      wb.block.merged_from = {{page->page_index, el.id}};
      wb.polygon = el.polygon;
      wb.first_on_page = i == 0;
      wb.last_on_page = i + 1 == elements.size();
      if (el.content) {
        wb.block.kind = el.content->kind;
        wb.block.value = el.content->value;
        if (el.content->kind != expected_kind(el.category) &&
            el.content->kind != ContentKind::PlainText) {
          if (warnings) {
            warnings->push_back("page " + std::to_string(page->page_index) + " element " +
                                std::to_string(el.id) + ": content kind " +
                                content_kind_to_string(el.content->kind) +
                                " inconsistent with category " + category_to_string(el.category) +
                                ", emitted as plain text");
          }
          wb.block.kind = ContentKind::PlainText;
        }
      }
      blocks.push_back(std::move(wb));
    }
  }

  // Cross-page table merging: last block of page p against first block of
  // page p+1. A merged block stays eligible as the tail for the next page.
  if (options.merge_cross_page_tables) {
    std::vector<WorkBlock> folded;
    for (auto& wb : blocks) {
      bool merged_in = false;
      if (!folded.empty() && wb.first_on_page && wb.block.kind == ContentKind::TableHtml) {
        WorkBlock& prev = folded.back();
        if (prev.last_on_page && prev.block.kind == ContentKind::TableHtml &&
            prev.block.page_index == wb.block.page_index - 1) {
          MergeDecision decision;
          try {
            const TableNode tail = parse_table_html(prev.block.value);
            const TableNode head = parse_table_html(wb.block.value);
            TableNode merged;
            decision = merge_tables(tail, head, &merged);
            if (decision.accepted) {
              prev.block.value = table_to_html(merged);
              prev.block.merged_from.push_back(wb.block.merged_from.front());
              prev.block.page_index = wb.block.page_index;  // stays tail-eligible
              prev.last_on_page = wb.last_on_page;
              merged_in = true;
            }
          } catch (const std::exception& e) {
            decision.accepted = false;
            decision.reason = std::string("malformed table: ") + e.what();
            if (warnings) warnings->push_back(decision.reason);
          }
          if (merge_log) merge_log->push_back(decision);
        }
      }
      if (!merged_in) folded.push_back(std::move(wb));
    }
    blocks = std::move(folded);
  }

  AssembledDocument doc;
  std::vector<std::string> md_parts;
  for (auto& wb : blocks) {
    if (!(options.exclude_decorative_from_markdown && is_decorative(wb.block.category))) {
      const std::string rendered = render_markdown_block(wb.block, wb.polygon);
      if (!rendered.empty()) md_parts.push_back(rendered);
    }
    doc.structured.push_back(std::move(wb.block));
  }
  for (size_t i = 0; i < md_parts.size(); ++i) {
    if (i) doc.markdown += "\n\n";
    doc.markdown += md_parts[i];
  }
  if (!doc.markdown.empty()) doc.markdown += "\n";
  return doc;
}

std::string assembled_to_json(const AssembledDocument& doc) {
  nlohmann::ordered_json root;
  root["markdown"] = doc.markdown;
  root["blocks"] = nlohmann::ordered_json::array();
  for (const auto& b : doc.structured) {
    nlohmann::ordered_json jb;
    jb["category"] = category_to_string(b.category);
    jb["kind"] = content_kind_to_string(b.kind);
    jb["value"] = b.value;
    jb["page_index"] = b.page_index;
    if (b.merged_from.size() > 1) {
      jb["merged_from"] = nlohmann::ordered_json::array();
      for (const auto& [page, id] : b.merged_from) jb["merged_from"].push_back({page, id});
    }
    root["blocks"].push_back(std::move(jb));
  }
  return root.dump(2) + "\n";
}

std::string merge_log_to_jsonl(const std::vector<MergeDecision>& log) {
  std::string out;
  for (const auto& d : log) {
    nlohmann::ordered_json jd;
    jd["tail_columns"] = d.tail_columns;
    jd["head_columns"] = d.head_columns;
    jd["header_duplicated"] = d.header_duplicated;
    jd["accepted"] = d.accepted;
    jd["reason"] = d.reason;
    out += jd.dump() + "\n";
  }
  return out;
}

}  // namespace docparse
