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
#include <utility>
#include <vector>

#include "docparse/core.hpp"
#include "docparse/table_tree.hpp"

namespace docparse {

struct AssembledBlock {
  Category category = Category::Text;
  ContentKind kind = ContentKind::PlainText;
  std::string value;
  int64_t page_index = 0;
  /// (page_index, element_id) of every fragment folded into this block;
  /// more than one entry only for merged cross-page tables.
  std::vector<std::pair<int64_t, int64_t>> merged_from;
};

struct AssembledDocument {
  std::string markdown;
  std::vector<AssembledBlock> structured;
};

struct MergeDecision {
  int tail_columns = 0;
  int head_columns = 0;
  bool header_duplicated = false;
  bool accepted = false;
  std::string reason;
};

struct AssembleOptions {
  bool merge_cross_page_tables = true;
  /// Decorative categories stay in the structured list but are dropped
  /// from the Markdown rendering.
  bool exclude_decorative_from_markdown = true;
};

/// Merge rule: accept iff the effective column counts (after colspan
/// expansion) are equal; when the first row of head equals the header row
/// of tail cell-by-cell (whitespace-normalized string equality), the
/// duplicate header is dropped. On acceptance *merged holds tail rows
/// followed by the remaining head rows.
MergeDecision merge_tables(const TableNode& tail, const TableNode& head,
                           TableNode* merged = nullptr);

/// Heading depth: doc_title is level 1; paragraph_title defaults to level 2,
/// or 1 + dot-segment count for dotted numbering prefixes ("2.1.3 ..."),
/// capped at 6.
int heading_level(Category category, const std::string& text);

/// Emits elements in (page_index, order) sequence: tables as HTML blocks,
/// formulas as display-math fences, text as paragraphs, images and charts
/// as placeholders carrying polygon provenance. Adjacent cross-page table
/// fragments (last block of page p, first of page p+1) are merged per
/// merge_tables; decisions are returned for audit when requested.
AssembledDocument assemble(const std::vector<PageDocument>& pages,
                           const AssembleOptions& options = {},
                           std::vector<MergeDecision>* merge_log = nullptr,
                           Warnings* warnings = nullptr);

std::string assembled_to_json(const AssembledDocument& doc);
std::string merge_log_to_jsonl(const std::vector<MergeDecision>& log);

}  // namespace docparse
