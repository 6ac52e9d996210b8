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

#include "docparse/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace docparse {

namespace {

using json = nlohmann::ordered_json;

const std::vector<std::string>& category_names() {
  static const std::vector<std::string> names = {
      "paragraph_title", "image",          "text",
      "number",          "abstract",       "content",
      "figure_title",    "display_formula", "table",
      "reference",       "doc_title",      "footnote",
      "header",          "algorithm",      "footer",
      "seal",            "chart",          "formula_number",
      "aside_text",      "reference_content", "header_image",
      "footer_image",    "inline_formula", "vertical_text",
      "vision_footnote"};
  return names;
}

}  // namespace

Category category_from_string(const std::string& label) {
  const auto& names = category_names();
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == label) return static_cast<Category>(i);
  }
  throw std::invalid_argument("unknown category label: \"" + label + "\"");
}

const std::string& category_to_string(Category c) {
  return category_names().at(static_cast<size_t>(c));
}

bool is_decorative(Category c) {
  switch (c) {
    case Category::Header:
    case Category::Footer:
    case Category::HeaderImage:
    case Category::FooterImage:
    case Category::VisionFootnote:
      return true;
    default:
      return false;
  }
}

Polygon Polygon::expanded() const {
  if (!is_box()) return *this;
  const Point tl = points[0];
  const Point br = points[1];
  return Polygon{{tl, {br.x, tl.y}, br, {tl.x, br.y}}};
}

void Polygon::validate() const {
  if (points.size() < 2) {
    throw std::invalid_argument("polygon needs at least 2 points, got " +
                                std::to_string(points.size()));
  }
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("non-finite polygon coordinate");
    }
    if (p.x < 0.0 || p.y < 0.0) {
      throw std::invalid_argument("negative polygon coordinate");
    }
  }
  if (is_box()) {
    if (points[0].x > points[1].x) {
      throw std::invalid_argument("2-point box: x_TL > x_BR");
    }
    if (points[0].y > points[1].y) {
      throw std::invalid_argument("2-point box: y_TL > y_BR");
    }
  }
}

ContentKind content_kind_from_string(const std::string& s) {
  if (s == "plain_text") return ContentKind::PlainText;
  if (s == "table_html") return ContentKind::TableHtml;
  if (s == "formula_latex") return ContentKind::FormulaLatex;
  if (s == "chart_table") return ContentKind::ChartTable;
  if (s == "seal_text") return ContentKind::SealText;
  throw std::invalid_argument("unknown content kind: \"" + s + "\"");
}

const std::string& content_kind_to_string(ContentKind k) {
  static const std::vector<std::string> names = {"plain_text", "table_html", "formula_latex",
                                                 "chart_table", "seal_text"};
  return names.at(static_cast<size_t>(k));
}

namespace {

void warn(Warnings* warnings, std::string msg) {
  if (warnings) warnings->push_back(std::move(msg));
}

void check_known_fields(const json& obj, const std::vector<std::string>& known,
                        const std::string& where, Warnings* warnings) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      warn(warnings, where + ": ignoring unknown field \"" + it.key() + "\"");
    }
  }
}

template <typename T>
T require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) {
    throw std::runtime_error(where + ": missing field \"" + key + "\"");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::runtime_error(where + ": field \"" + key + "\" has wrong type");
  }
}

Polygon parse_polygon(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw std::runtime_error(where + ": polygon must be an array");
  Polygon poly;
  for (const auto& pt : arr) {
    if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
      throw std::runtime_error(where + ": polygon point must be [x,y]");
    }
    poly.points.push_back({pt[0].get<double>(), pt[1].get<double>()});
  }
  try {
    poly.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(where + ": " + e.what());
  }
  return poly;
}

LayoutElement parse_element(const json& obj, const std::string& where, Warnings* warnings) {
  if (!obj.is_object()) throw std::runtime_error(where + ": element must be an object");
  check_known_fields(obj, {"id", "category", "polygon", "confidence", "order", "content"},
                     where, warnings);
  LayoutElement el;
  el.id = require<int64_t>(obj, "id", where);
  if (el.id < 0) throw std::runtime_error(where + ": negative element id");
  try {
    el.category = category_from_string(require<std::string>(obj, "category", where));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(where + ": " + e.what());
  }
  if (!obj.contains("polygon")) throw std::runtime_error(where + ": missing field \"polygon\"");
  el.polygon = parse_polygon(obj.at("polygon"), where);
  el.confidence = require<double>(obj, "confidence", where);
  if (!(el.confidence >= 0.0 && el.confidence <= 1.0)) {
    throw std::runtime_error(where + ": confidence outside [0,1]");
  }
  el.order = require<int64_t>(obj, "order", where);
  if (el.order < 0) throw std::runtime_error(where + ": negative order rank");
  if (obj.contains("content") && !obj.at("content").is_null()) {
    const json& c = obj.at("content");
    check_known_fields(c, {"kind", "value"}, where + ".content", warnings);
    ContentPayload payload;
    try {
      payload.kind = content_kind_from_string(require<std::string>(c, "kind", where + ".content"));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
    payload.value = require<std::string>(c, "value", where + ".content");
    el.content = std::move(payload);
  }
  return el;
}

}  // namespace

std::vector<PageDocument> parse_document_json(const std::string& json_text, Warnings* warnings) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("document JSON parse error: ") + e.what());
  }
  if (!root.is_object()) throw std::runtime_error("document root must be an object");
  check_known_fields(root, {"pages"}, "document", warnings);
  if (!root.contains("pages") || !root.at("pages").is_array()) {
    throw std::runtime_error("document: missing \"pages\" array");
  }
  std::vector<PageDocument> pages;
  for (size_t pi = 0; pi < root.at("pages").size(); ++pi) {
    const json& pobj = root.at("pages").at(pi);
    const std::string where = "pages[" + std::to_string(pi) + "]";
    check_known_fields(pobj, {"page_index", "width_px", "height_px", "elements"}, where,
                       warnings);
    PageDocument page;
    page.page_index = require<int64_t>(pobj, "page_index", where);
    page.width_px = require<int64_t>(pobj, "width_px", where);
    page.height_px = require<int64_t>(pobj, "height_px", where);
    if (page.page_index < 0) throw std::runtime_error(where + ": negative page_index");
    if (page.width_px <= 0 || page.height_px <= 0) {
      throw std::runtime_error(where + ": non-positive page dimensions");
    }
    if (!pobj.contains("elements") || !pobj.at("elements").is_array()) {
      throw std::runtime_error(where + ": missing \"elements\" array");
    }
    for (size_t ei = 0; ei < pobj.at("elements").size(); ++ei) {
      page.elements.push_back(parse_element(
          pobj.at("elements").at(ei), where + ".elements[" + std::to_string(ei) + "]", warnings));
    }
    Warnings page_warnings = validate_page(page);
    if (warnings) {
      for (auto& w : page_warnings) warnings->push_back(where + ": " + w);
    }
    pages.push_back(std::move(page));
  }
  return pages;
}

std::vector<PageDocument> load_document(const std::string& path, Warnings* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open document file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_document_json(buf.str(), warnings);
}

std::string document_to_json(const std::vector<PageDocument>& pages) {
  json root;
  root["pages"] = json::array();
  for (const auto& page : pages) {
    json pobj;
    pobj["page_index"] = page.page_index;
    pobj["width_px"] = page.width_px;
    pobj["height_px"] = page.height_px;
    pobj["elements"] = json::array();
    for (const auto& el : page.elements) {
      json eobj;
      eobj["id"] = el.id;
      eobj["category"] = category_to_string(el.category);
      json poly = json::array();
      for (const auto& p : el.polygon.points) poly.push_back({p.x, p.y});
      eobj["polygon"] = std::move(poly);
      eobj["confidence"] = el.confidence;
      eobj["order"] = el.order;
      if (el.content) {
        eobj["content"] = {{"kind", content_kind_to_string(el.content->kind)},
                           {"value", el.content->value}};
      } else {
        eobj["content"] = nullptr;
      }
      pobj["elements"].push_back(std::move(eobj));
    }
    root["pages"].push_back(std::move(pobj));
  }
  return root.dump(2) + "\n";
}

void save_document(const std::string& path, const std::vector<PageDocument>& pages) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write document file: " + path);
  out << document_to_json(pages);
}

Warnings validate_page(PageDocument& page) {
  Warnings warnings;
  const double w = static_cast<double>(page.width_px);
  const double h = static_cast<double>(page.height_px);
  std::unordered_set<int64_t> seen_ids;
  for (auto& el : page.elements) {
    if (!seen_ids.insert(el.id).second) {
      warnings.push_back("duplicate element id " + std::to_string(el.id));
    }
    for (auto& p : el.polygon.points) {
      const double cx = std::clamp(p.x, 0.0, w);
      const double cy = std::clamp(p.y, 0.0, h);
      if (cx != p.x || cy != p.y) {
        warnings.push_back("element " + std::to_string(el.id) + ": vertex (" +
                           std::to_string(p.x) + "," + std::to_string(p.y) +
                           ") outside page, clamped");
        p.x = cx;
        p.y = cy;
      }
    }
  }
  return warnings;
}

}  // namespace docparse
