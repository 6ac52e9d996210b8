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

#include "docparse/table_tree.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <stdexcept>

#include "docparse/edit_distance.hpp"

namespace docparse {

namespace {

const std::vector<std::string> kKnownLabels = {"table", "thead", "tbody", "tr", "td", "th"};

bool known_label(const std::string& label) {
  return std::find(kKnownLabels.begin(), kKnownLabels.end(), label) != kKnownLabels.end();
}

std::string decode_entities(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    const size_t semi = s.find(';', i);
    if (semi == std::string::npos || semi - i > 8) {
      out += s[i++];
      continue;
    }
    const std::string name = s.substr(i + 1, semi - i - 1);
    if (name == "amp") out += '&';
    else if (name == "lt") out += '<';
    else if (name == "gt") out += '>';
    else if (name == "quot") out += '"';
    else if (name == "apos") out += '\'';
    else if (name == "nbsp") out += ' ';
    else if (!name.empty() && name[0] == '#') {
      const long cp = std::strtol(name.c_str() + 1, nullptr, 10);
      if (cp > 0 && cp < 128) out += static_cast<char>(cp);
      else out += '?';
    } else {
      out += '&' + name + ';';
      i = semi + 1;
      continue;
    }
    i = semi + 1;
  }
  return out;
}

struct Token {
  enum Kind { Open, Close, Text } kind;
  std::string tag;
  int colspan = 1;
  int rowspan = 1;
  std::string text;
};

std::vector<Token> tokenize(const std::string& html) {
  std::vector<Token> tokens;
  size_t i = 0;
  while (i < html.size()) {
    if (html[i] != '<') {
      const size_t next = html.find('<', i);
      const size_t end = next == std::string::npos ? html.size() : next;
      std::string text = decode_entities(html.substr(i, end - i));
      if (!text.empty()) tokens.push_back({Token::Text, "", 1, 1, std::move(text)});
      i = end;
      continue;
    }
    const size_t close = html.find('>', i);
    if (close == std::string::npos) throw std::runtime_error("table HTML: unterminated tag");
    std::string body = html.substr(i + 1, close - i - 1);
    i = close + 1;
    bool is_close = false;
    if (!body.empty() && body[0] == '/') {
      is_close = true;
      body.erase(0, 1);
    }
    // Tag name.
    size_t p = 0;
    while (p < body.size() && (std::isalnum(static_cast<unsigned char>(body[p])))) ++p;
    std::string tag = body.substr(0, p);
    std::transform(tag.begin(), tag.end(), tag.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (tag.empty()) throw std::runtime_error("table HTML: empty tag name");
    if (!known_label(tag)) throw std::runtime_error("table HTML: unknown tag <" + tag + ">");
    Token tok{is_close ? Token::Close : Token::Open, tag, 1, 1, ""};
    // Attributes (colspan/rowspan only; others ignored).
    while (p < body.size()) {
      while (p < body.size() && std::isspace(static_cast<unsigned char>(body[p]))) ++p;
      size_t name_start = p;
      while (p < body.size() && (std::isalnum(static_cast<unsigned char>(body[p])) || body[p] == '-'))
        ++p;
      if (p == name_start) break;
      std::string attr = body.substr(name_start, p - name_start);
      std::string value;
      while (p < body.size() && std::isspace(static_cast<unsigned char>(body[p]))) ++p;
      if (p < body.size() && body[p] == '=') {
        ++p;
        while (p < body.size() && std::isspace(static_cast<unsigned char>(body[p]))) ++p;
        if (p < body.size() && (body[p] == '"' || body[p] == '\'')) {
          const char quote = body[p++];
          const size_t vend = body.find(quote, p);
          if (vend == std::string::npos) throw std::runtime_error("table HTML: unterminated attribute");
          value = body.substr(p, vend - p);
          p = vend + 1;
        } else {
          size_t vstart = p;
          while (p < body.size() && !std::isspace(static_cast<unsigned char>(body[p]))) ++p;
          value = body.substr(vstart, p - vstart);
        }
      }
      std::transform(attr.begin(), attr.end(), attr.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (attr == "colspan" || attr == "rowspan") {
        const int v = std::atoi(value.c_str());
        if (v < 1) throw std::runtime_error("table HTML: invalid " + attr + " \"" + value + "\"");
        (attr == "colspan" ? tok.colspan : tok.rowspan) = v;
      }
    }
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

TableNode parse_node(const std::vector<Token>& tokens, size_t* pos) {
  const Token& open = tokens[*pos];
  ++*pos;
  TableNode node;
  node.label = open.tag;
  node.colspan = open.colspan;
  node.rowspan = open.rowspan;
  const bool is_cell = node.label == "td" || node.label == "th";
  while (*pos < tokens.size()) {
    const Token& t = tokens[*pos];
    if (t.kind == Token::Close) {
      if (t.tag != node.label) {
        throw std::runtime_error("table HTML: mismatched </" + t.tag + "> inside <" + node.label +
                                 ">");
      }
      ++*pos;
      return node;
    }
    if (t.kind == Token::Text) {
      if (is_cell) node.text += t.text;
      else if (!is_blank(t.text)) {
        throw std::runtime_error("table HTML: text outside a cell: \"" + t.text + "\"");
      }
      ++*pos;
      continue;
    }
    node.children.push_back(parse_node(tokens, pos));
  }
  throw std::runtime_error("table HTML: missing </" + node.label + ">");
}

}  // namespace

TableNode parse_table_html(const std::string& html) {
  const std::vector<Token> tokens = tokenize(html);
  size_t pos = 0;
  while (pos < tokens.size() && tokens[pos].kind == Token::Text && is_blank(tokens[pos].text)) ++pos;
  if (pos >= tokens.size() || tokens[pos].kind != Token::Open || tokens[pos].tag != "table") {
    throw std::runtime_error("table HTML: root must be <table>");
  }
  TableNode root = parse_node(tokens, &pos);
  while (pos < tokens.size()) {
    if (tokens[pos].kind != Token::Text || !is_blank(tokens[pos].text)) {
      throw std::runtime_error("table HTML: trailing content after </table>");
    }
    ++pos;
  }
  return root;
}

std::string table_to_html(const TableNode& tree) {
  std::string out = "<" + tree.label;
  if (tree.colspan != 1) out += " colspan=\"" + std::to_string(tree.colspan) + "\"";
  if (tree.rowspan != 1) out += " rowspan=\"" + std::to_string(tree.rowspan) + "\"";
  out += ">";
  std::string text = tree.text;
  std::string escaped;
  for (char c : text) {
    if (c == '&') escaped += "&amp;";
    else if (c == '<') escaped += "&lt;";
    else if (c == '>') escaped += "&gt;";
    else escaped += c;
  }
  out += escaped;
  for (const auto& child : tree.children) out += table_to_html(child);
  out += "</" + tree.label + ">";
  return out;
}

size_t tree_size(const TableNode& tree) {
  size_t n = 1;
  for (const auto& c : tree.children) n += tree_size(c);
  return n;
}

namespace {

struct FlatTree {
  std::vector<const TableNode*> post;  // postorder
  std::vector<int> lml;                // leftmost leaf descendant, postorder index
  std::vector<int> keyroots;
};

int flatten(const TableNode& node, FlatTree* out) {
  int leftmost = -1;
  for (const auto& c : node.children) {
    const int child_lml = flatten(c, out);
    if (leftmost == -1) leftmost = child_lml;
  }
  out->post.push_back(&node);
  const int idx = static_cast<int>(out->post.size()) - 1;
  out->lml.push_back(leftmost == -1 ? idx : leftmost);
  return out->lml.back();
}

FlatTree flatten(const TableNode& root) {
  FlatTree ft;
  flatten(root, &ft);
  const int n = static_cast<int>(ft.post.size());
  std::vector<bool> seen(n, false);
  for (int i = n - 1; i >= 0; --i) {
    if (!seen[ft.lml[i]]) {
      ft.keyroots.push_back(i);
      seen[ft.lml[i]] = true;
    }
  }
  std::sort(ft.keyroots.begin(), ft.keyroots.end());
  return ft;
}

double rename_cost(const TableNode& a, const TableNode& b, bool structure_only) {
  if (a.label != b.label) return 1.0;
  if (a.label == "td" || a.label == "th") {
    if (a.colspan != b.colspan || a.rowspan != b.rowspan) return 1.0;
    if (structure_only) return 0.0;
    return normalized_edit_distance(a.text, b.text);
  }
  return 0.0;
}

// Zhang-Shasha ordered-tree edit distance with unit insert/delete costs.
double zhang_shasha(const FlatTree& ta, const FlatTree& tb, bool structure_only) {
  const int m = static_cast<int>(ta.post.size());
  const int n = static_cast<int>(tb.post.size());
  std::vector<std::vector<double>> td(m, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> fd(m + 1, std::vector<double>(n + 1, 0.0));

  for (int ki : ta.keyroots) {
    for (int kj : tb.keyroots) {
      const int li = ta.lml[ki];
      const int lj = tb.lml[kj];
      fd[li][lj] = 0.0;
      for (int i = li; i <= ki; ++i) fd[i + 1][lj] = fd[i][lj] + 1.0;
      for (int j = lj; j <= kj; ++j) fd[li][j + 1] = fd[li][j] + 1.0;
      for (int i = li; i <= ki; ++i) {
        for (int j = lj; j <= kj; ++j) {
          if (ta.lml[i] == li && tb.lml[j] == lj) {
            const double ren = rename_cost(*ta.post[i], *tb.post[j], structure_only);
            fd[i + 1][j + 1] = std::min({fd[i][j + 1] + 1.0, fd[i + 1][j] + 1.0, fd[i][j] + ren});
            td[i][j] = fd[i + 1][j + 1];
          } else {
            fd[i + 1][j + 1] =
                std::min({fd[i][j + 1] + 1.0, fd[i + 1][j] + 1.0,
                          fd[ta.lml[i]][tb.lml[j]] + td[i][j]});
          }
        }
      }
    }
  }
  return td[m - 1][n - 1];
}

// Fallback for very large trees: normalized edit distance over the preorder
// node-signature sequence, scaled back to a pseudo edit count.
double approximate_distance(const TableNode& a, const TableNode& b, bool structure_only) {
  std::vector<size_t> sa, sb;
  std::function<void(const TableNode&, std::vector<size_t>&)> walk =
      [&](const TableNode& node, std::vector<size_t>& out) {
        std::string sig = node.label + "|" + std::to_string(node.colspan) + "|" +
                          std::to_string(node.rowspan);
        if (!structure_only && (node.label == "td" || node.label == "th")) sig += "|" + node.text;
        out.push_back(std::hash<std::string>{}(sig));
        for (const auto& c : node.children) walk(c, out);
      };
  walk(a, sa);
  walk(b, sb);
  return static_cast<double>(levenshtein(sa, sb));
}

}  // namespace

double tree_edit_distance(const TableNode& a, const TableNode& b, bool structure_only) {
  return zhang_shasha(flatten(a), flatten(b), structure_only);
}

double teds(const TableNode& pred, const TableNode& gt, bool structure_only, bool* approximate) {
  const size_t np = tree_size(pred);
  const size_t ng = tree_size(gt);
  const size_t largest = std::max(np, ng);
  if (largest == 0) return 1.0;
  double dist;
  if (largest > 5000) {
    dist = approximate_distance(pred, gt, structure_only);
    if (approximate) *approximate = true;
  } else {
    dist = tree_edit_distance(pred, gt, structure_only);
    if (approximate) *approximate = false;
  }
  const double sim = 1.0 - dist / static_cast<double>(largest);
  return std::clamp(sim, 0.0, 1.0);
}

std::vector<const TableNode*> table_rows(const TableNode& tree) {
  std::vector<const TableNode*> rows;
  std::function<void(const TableNode&)> walk = [&](const TableNode& node) {
    if (node.label == "tr") {
      rows.push_back(&node);
      return;
    }
    for (const auto& c : node.children) walk(c);
  };
  walk(tree);
  return rows;
}

int effective_columns(const TableNode& row) {
  int cols = 0;
  for (const auto& c : row.children) {
    if (c.label == "td" || c.label == "th") cols += c.colspan;
  }
  return cols;
}

}  // namespace docparse
