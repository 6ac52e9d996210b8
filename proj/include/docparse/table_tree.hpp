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

#include <string>
#include <vector>

namespace docparse {

/// Rooted ordered labeled tree parsed from table HTML. Labels are one of
/// table, thead, tbody, tr, td, th. td/th nodes carry span attributes and
/// cell text; children order is preserved from the source.
struct TableNode {
  std::string label;
  int colspan = 1;
  int rowspan = 1;
  std::string text;
  std::vector<TableNode> children;
};

/// Parses a table HTML fragment into a TableNode (root label "table").
/// Throws std::runtime_error on malformed markup (unbalanced tags, unknown
/// tags, missing table root).
TableNode parse_table_html(const std::string& html);

/// Serializes a TableNode back to HTML.
std::string table_to_html(const TableNode& tree);

size_t tree_size(const TableNode& tree);

/// Tree-edit-distance-based similarity: 1 - TED/max(|pred|,|gt|).
/// TED is ordered-tree edit distance with unit insert/delete cost; rename
/// cost is 1 for differing labels or span attributes, the normalized edit
/// distance of cell text for matching td/th nodes (0 in structure_only
/// mode), 0 otherwise. Trees above 5000 nodes fall back to a flattened
/// label-sequence approximation; *approximate is set when provided.
double teds(const TableNode& pred, const TableNode& gt, bool structure_only,
            bool* approximate = nullptr);

/// Ordered-tree edit distance (Zhang-Shasha) with the TEDS cost model.
double tree_edit_distance(const TableNode& a, const TableNode& b, bool structure_only);

/// Rows of the table in source order, descending through thead/tbody.
std::vector<const TableNode*> table_rows(const TableNode& tree);

/// Column count of a row after colspan expansion.
int effective_columns(const TableNode& row);

}  // namespace docparse
