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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace docparse {

/// The 25 layout component categories.
enum class Category {
  ParagraphTitle,
  Image,
  Text,
  Number,
  Abstract,
  Content,
  FigureTitle,
  DisplayFormula,
  Table,
  Reference,
  DocTitle,
  Footnote,
  Header,
  Algorithm,
  Footer,
  Seal,
  Chart,
  FormulaNumber,
  AsideText,
  ReferenceContent,
  HeaderImage,
  FooterImage,
  InlineFormula,
  VerticalText,
  VisionFootnote,
};

inline constexpr int kCategoryCount = 25;

/// Parses a category label. Throws std::invalid_argument on unknown labels;
/// never falls back to a default.
Category category_from_string(const std::string& label);
const std::string& category_to_string(Category c);

/// Decorative categories are excluded from reading-order scoring and
/// Markdown output by default.
bool is_decorative(Category c);

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

/// Ordered vertex list. Length >= 3 for general regions, 4 for quads.
/// Length 2 is the axis-aligned box shorthand (TL, BR corners).
struct Polygon {
  std::vector<Point> points;

  bool is_box() const { return points.size() == 2; }
  /// Expands a 2-point box into its 4 corners (TL, TR, BR, BL);
  /// other polygons are returned unchanged.
  Polygon expanded() const;
  /// Throws std::invalid_argument if the polygon violates an invariant
  /// (too few points, non-finite or negative coordinate, inverted box).
  void validate() const;
};

enum class ContentKind { PlainText, TableHtml, FormulaLatex, ChartTable, SealText };

ContentKind content_kind_from_string(const std::string& s);
const std::string& content_kind_to_string(ContentKind k);

struct ContentPayload {
  ContentKind kind = ContentKind::PlainText;
  std::string value;
  bool operator==(const ContentPayload&) const = default;
};

struct LayoutElement {
  int64_t id = 0;
  Category category = Category::Text;
  Polygon polygon;
  double confidence = 1.0;
  int64_t order = 0;
  std::optional<ContentPayload> content;
};

struct PageDocument {
  int64_t page_index = 0;
  int64_t width_px = 0;
  int64_t height_px = 0;
  std::vector<LayoutElement> elements;
};

using Warnings = std::vector<std::string>;

/// Loads a ground-truth / prediction JSON file. Schema violations, unknown
/// category labels and non-finite coordinates throw std::runtime_error.
/// Non-fatal issues (clamped vertices, unknown extra fields) are appended
/// to *warnings when provided.
std::vector<PageDocument> load_document(const std::string& path, Warnings* warnings = nullptr);

/// Same, from an in-memory JSON string.
std::vector<PageDocument> parse_document_json(const std::string& json_text,
                                              Warnings* warnings = nullptr);

/// Serializes pages to the canonical JSON form used by load_document.
std::string document_to_json(const std::vector<PageDocument>& pages);
void save_document(const std::string& path, const std::vector<PageDocument>& pages);

/// Checks page invariants. Out-of-bounds vertices are clamped in place and
/// reported; duplicate element ids are reported. Returns the warning list,
/// empty iff nothing needed fixing.
Warnings validate_page(PageDocument& page);

}  // namespace docparse
