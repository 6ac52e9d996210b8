#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "docparse/edit_distance.hpp"
#include "docparse/geometry.hpp"
#include "docparse/metrics.hpp"
#include "docparse/table_tree.hpp"

using namespace docparse;

namespace {

// Direct recursive definition of Levenshtein distance, used as an oracle.
size_t lev_oracle(const std::string& a, const std::string& b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  const size_t del = lev_oracle(a.substr(1), b) + 1;
  const size_t ins = lev_oracle(a, b.substr(1)) + 1;
  const size_t sub = lev_oracle(a.substr(1), b.substr(1)) + (a[0] == b[0] ? 0 : 1);
  return std::min({del, ins, sub});
}

size_t forest_size(const std::vector<const TableNode*>& f) {
  size_t n = 0;
  for (const auto* t : f) n += tree_size(*t);
  return n;
}

double rename_oracle(const TableNode& a, const TableNode& b, bool structure_only) {
  if (a.label != b.label) return 1.0;
  if (a.label == "td" || a.label == "th") {
    if (a.colspan != b.colspan || a.rowspan != b.rowspan) return 1.0;
    if (structure_only) return 0.0;
    return normalized_edit_distance(a.text, b.text);
  }
  return 0.0;
}

// Exponential ordered-forest edit distance straight from the recurrence.
double ted_oracle(std::vector<const TableNode*> a, std::vector<const TableNode*> b,
                  bool structure_only) {
  if (a.empty()) return static_cast<double>(forest_size(b));
  if (b.empty()) return static_cast<double>(forest_size(a));
  const TableNode* ra = a.back();
  const TableNode* rb = b.back();
  auto drop_root = [](std::vector<const TableNode*> f) {
    const TableNode* last = f.back();
    f.pop_back();
    for (const auto& c : last->children) f.push_back(&c);
    return f;
  };
  const double del = ted_oracle(drop_root(a), b, structure_only) + 1.0;
  const double ins = ted_oracle(a, drop_root(b), structure_only) + 1.0;
  std::vector<const TableNode*> ca, cb;
  for (const auto& c : ra->children) ca.push_back(&c);
  for (const auto& c : rb->children) cb.push_back(&c);
  std::vector<const TableNode*> rest_a(a.begin(), a.end() - 1);
  std::vector<const TableNode*> rest_b(b.begin(), b.end() - 1);
  const double match = ted_oracle(rest_a, rest_b, structure_only) +
                       ted_oracle(ca, cb, structure_only) +
                       rename_oracle(*ra, *rb, structure_only);
  return std::min({del, ins, match});
}

Polygon box(double x0, double y0, double x1, double y1) {
  Polygon p;
  p.points = {{x0, y0}, {x1, y1}};
  return p;
}

LayoutElement element(int64_t id, Category cat, Polygon poly, int64_t order) {
  LayoutElement el;
  el.id = id;
  el.category = cat;
  el.polygon = std::move(poly);
  el.order = order;
  return el;
}

GridQuad quad_at(int x, int y, int w, int h) {
  GridQuad q;
  q.v = {{{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}}};
  return q;
}

}  // namespace

TEST_CASE("utf8 decoding") {
  CHECK(utf8_to_codepoints("abc").size() == 3);
  CHECK(utf8_to_codepoints("北京").size() == 2);
  const auto bad = utf8_to_codepoints("a\xFFz");
  REQUIRE(bad.size() == 3);
  CHECK(bad[1] == 0xFFFD);
}

TEST_CASE("edit distance examples") {
  CHECK(edit_distance("kitten", "sitting") == 3);
  CHECK(edit_distance("", "") == 0);
  CHECK(edit_distance("abc", "") == 3);
  CHECK(edit_distance("北京印章", "北京印张") == 1);
  CHECK(normalized_edit_distance("", "") == 0.0);
  CHECK(normalized_edit_distance("北京印章", "北京印张") == doctest::Approx(0.25));
}

TEST_CASE("edit distance matches the recursive oracle exhaustively") {
  std::vector<std::string> strings = {""};
  for (int len = 1; len <= 4; ++len) {
    const size_t start = strings.size();
    for (size_t s = 0; s < start; ++s) {
      if (strings[s].size() == static_cast<size_t>(len - 1)) {
        strings.push_back(strings[s] + "a");
        strings.push_back(strings[s] + "b");
      }
    }
  }
  for (const auto& a : strings) {
    for (const auto& b : strings) {
      CHECK(edit_distance(a, b) == lev_oracle(a, b));
    }
  }
}

TEST_CASE("edit distance satisfies the metric axioms") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> len(0, 8);
  std::uniform_int_distribution<int> ch(0, 2);
  auto random_string = [&] {
    std::string s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) s += static_cast<char>('a' + ch(rng));
    return s;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const std::string a = random_string(), b = random_string(), c = random_string();
    CHECK(edit_distance(a, a) == 0);
    CHECK(edit_distance(a, b) == edit_distance(b, a));
    CHECK(edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c));
  }
}

TEST_CASE("latex tokenization") {
  const auto tokens = latex_tokens("\\frac{a}{b}");
  CHECK(tokens == std::vector<std::string>{"\\frac", "{", "a", "}", "{", "b", "}"});
  CHECK(latex_tokens("\\alpha \\beta").size() == 2);
  CHECK(latex_tokens("x^2 + 1").size() == 5);
  CHECK(latex_tokens("\\,").size() == 1);
}

TEST_CASE("formula proxy") {
  CHECK(formula_proxy("\\frac{a}{b}", "\\frac{a}{b}") == 1.0);
  CHECK(formula_proxy("", "") == 1.0);
  // One of seven tokens substituted.
  CHECK(formula_proxy("\\frac{a}{b}", "\\frac{a}{c}") == doctest::Approx(1.0 - 1.0 / 7.0));
  CHECK(formula_proxy("xyz", "") == 0.0);
}

TEST_CASE("identical tables score TEDS 1.0") {
  const auto t = parse_table_html("<table><tr><td>a</td><td>b</td></tr></table>");
  CHECK(teds(t, t, false) == 1.0);
  CHECK(teds(t, t, true) == 1.0);
}

TEST_CASE("worked TEDS example: one deleted cell out of four nodes") {
  const auto gt = parse_table_html("<table><tr><td>a</td><td>b</td></tr></table>");
  const auto pred = parse_table_html("<table><tr><td>a</td></tr></table>");
  // TED = 1 deletion, max size 4, similarity 1 - 1/4.
  CHECK(std::abs(teds(pred, gt, false) - 0.75) <= 1e-12);
  CHECK(std::abs(teds(pred, gt, true) - 0.75) <= 1e-12);
}

TEST_CASE("cell text differences count in content mode only") {
  const auto gt = parse_table_html("<table><tbody><tr><td>abc</td><td>x</td></tr></tbody></table>");
  const auto pred = parse_table_html("<table><tbody><tr><td>abd</td><td>x</td></tr></tbody></table>");
  // Rename cost NED("abc","abd") = 1/3 over 5 nodes.
  CHECK(teds(pred, gt, false) == doctest::Approx(1.0 - (1.0 / 3.0) / 5.0).epsilon(1e-12));
  CHECK(teds(pred, gt, true) == 1.0);
}

TEST_CASE("span attribute differences are a full rename") {
  const auto gt = parse_table_html("<table><tr><td colspan=\"2\">a</td></tr></table>");
  const auto pred = parse_table_html("<table><tr><td>a</td></tr></table>");
  CHECK(teds(pred, gt, true) == doctest::Approx(1.0 - 1.0 / 3.0));
}

TEST_CASE("tree edit distance matches the brute-force oracle") {
  const std::vector<std::string> pool = {
      "<table></table>",
      "<table><tr></tr></table>",
      "<table><tr><td>a</td></tr></table>",
      "<table><tr><td>a</td><td>b</td></tr></table>",
      "<table><tr><td>ab</td></tr><tr><td>c</td></tr></table>",
      "<table><tbody><tr><td>a</td></tr></tbody></table>",
      "<table><thead><tr><th>h</th></tr></thead></table>",
      "<table><tr><td colspan=\"2\">a</td></tr></table>",
      "<table><tr><td rowspan=\"3\">a</td><td>b</td></tr></table>",
      "<table><tbody><tr><td>x</td><td>y</td></tr></tbody></table>",
  };
  std::vector<TableNode> trees;
  for (const auto& html : pool) trees.push_back(parse_table_html(html));
  for (const auto& a : trees) {
    for (const auto& b : trees) {
      for (bool structure_only : {false, true}) {
        const double got = tree_edit_distance(a, b, structure_only);
        const double want = ted_oracle({&a}, {&b}, structure_only);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("malformed table HTML throws") {
  CHECK_THROWS_AS(parse_table_html("<table><tr><td>a</tr></table>"), std::runtime_error);
  CHECK_THROWS_AS(parse_table_html("<div>x</div>"), std::runtime_error);
  CHECK_THROWS_AS(parse_table_html("<table>stray</table>"), std::runtime_error);
  CHECK_THROWS_AS(parse_table_html("<tr><td>a</td></tr>"), std::runtime_error);
}

TEST_CASE("table HTML roundtrips through the tree") {
  const std::string html =
      "<table><thead><tr><th>A &amp; B</th></tr></thead><tbody><tr><td colspan=\"2\">x</td></tr>"
      "</tbody></table>";
  const auto tree = parse_table_html(html);
  CHECK(table_to_html(tree) == html);
}

TEST_CASE("polygon IoU on boxes") {
  CHECK(polygon_iou(box(0, 0, 10, 10), box(0, 0, 10, 10)) == doctest::Approx(1.0));
  CHECK(polygon_iou(box(0, 0, 10, 10), box(5, 0, 15, 10)) == doctest::Approx(1.0 / 3.0));
  CHECK(polygon_iou(box(0, 0, 10, 10), box(20, 20, 30, 30)) == 0.0);
}

TEST_CASE("polygon IoU input policing") {
  Polygon bowtie;
  bowtie.points = {{0, 0}, {10, 10}, {10, 0}, {0, 10}};
  CHECK_THROWS_AS(polygon_iou(bowtie, box(0, 0, 10, 10)), std::invalid_argument);

  Polygon degenerate;
  degenerate.points = {{0, 0}, {0, 0}};
  CHECK_THROWS_AS(polygon_iou(degenerate, degenerate), std::domain_error);

  Polygon notch;  // non-convex L-shape, evaluated on its hull with a warning
  notch.points = {{0, 0}, {10, 0}, {10, 10}, {5, 10}, {5, 5}, {0, 5}};
  std::vector<std::string> warnings;
  // Hull (0,0)(10,0)(10,10)(5,10)(0,5) has area 87.5 inside the 100-unit box.
  CHECK(polygon_iou(notch, box(0, 0, 10, 10), &warnings) == doctest::Approx(0.875));
  CHECK(!warnings.empty());
}

TEST_CASE("greedy matching is one-to-one and deterministic") {
  const std::vector<Polygon> pred = {box(0, 0, 10, 10), box(0, 0, 10, 10), box(100, 0, 110, 10)};
  const std::vector<Polygon> gt = {box(0, 0, 10, 10), box(200, 0, 210, 10)};
  const auto m = greedy_iou_match(pred, gt, 0.5);
  REQUIRE(m.pairs.size() == 1);
  CHECK(m.pairs[0].pred_index == 0);  // tie broken by lower pred index
  CHECK(m.pairs[0].gt_index == 0);
  CHECK(m.unmatched_pred == std::vector<size_t>{1, 2});
  CHECK(m.unmatched_gt == std::vector<size_t>{1});
}

TEST_CASE("greedy matching prefers the higher IoU") {
  const std::vector<Polygon> pred = {box(0, 0, 10, 10)};
  const std::vector<Polygon> gt = {box(2, 0, 12, 10), box(0, 0, 10, 10)};
  const auto m = greedy_iou_match(pred, gt, 0.3);
  REQUIRE(m.pairs.size() == 1);
  CHECK(m.pairs[0].gt_index == 1);
  CHECK(m.pairs[0].iou == doctest::Approx(1.0));
}

TEST_CASE("reading order edit distance") {
  PageDocument gt;
  gt.width_px = gt.height_px = 100;
  gt.elements = {element(0, Category::Text, box(0, 0, 10, 10), 0),
                 element(1, Category::Text, box(0, 20, 10, 30), 1),
                 element(2, Category::Text, box(0, 40, 10, 50), 2)};
  PageDocument pred = gt;
  CHECK(reading_order_edit(pred, gt) == 0.0);

  pred.elements[0].order = 2;
  pred.elements[2].order = 0;
  CHECK(reading_order_edit(pred, gt) == doctest::Approx(2.0 / 3.0));

  // A prediction at an unmatched location contributes nothing; the missing
  // GT symbol costs one edit.
  PageDocument partial = gt;
  partial.elements[2].polygon = box(90, 90, 99, 99);
  CHECK(reading_order_edit(partial, gt) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("decorative elements are excluded from reading order") {
  PageDocument gt;
  gt.width_px = gt.height_px = 100;
  gt.elements = {element(0, Category::Header, box(0, 0, 10, 5), 0),
                 element(1, Category::Text, box(0, 20, 10, 30), 1)};
  PageDocument pred = gt;
  pred.elements[0].order = 5;  // shuffling the header must not matter
  CHECK(reading_order_edit(pred, gt) == 0.0);
  // Included, the swap reverses both symbols of the 2-element sequence.
  CHECK(reading_order_edit(pred, gt, 0.5, false) == doctest::Approx(1.0));
}

TEST_CASE("spotting accuracy") {
  const TextInstance a{"DREAM", quad_at(100, 100, 50, 20)};
  CHECK(spotting_accuracy({a}, {a}, 0.5) == 1.0);

  const TextInstance typo{"DREAN", quad_at(100, 100, 50, 20)};
  CHECK(spotting_accuracy({typo}, {a}, 0.5) == doctest::Approx(0.8));

  const TextInstance far{"DREAM", quad_at(800, 800, 50, 20)};
  CHECK(spotting_accuracy({far}, {a}, 0.5) == 0.0);
  CHECK(spotting_accuracy({}, {}, 0.5) == 1.0);
  CHECK(spotting_accuracy({a}, {}, 0.5) == 0.0);
  // An extra unmatched prediction dilutes the score.
  CHECK(spotting_accuracy({a, far}, {a}, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("seal NED") {
  CHECK(seal_ned("北京印章", "北京印章") == 0.0);
  CHECK(seal_ned("北京印张", "北京印章") == doctest::Approx(0.25));
}

TEST_CASE("overall score") {
  CHECK(overall_score(0.0, 1.0, 1.0) == doctest::Approx(100.0));
  CHECK(overall_score(0.1, 0.9, 0.8) == doctest::Approx(100.0 * (0.9 + 0.9 + 0.8) / 3.0));
  MetricWeights w;
  w.text = 0.5;
  w.formula = 0.3;
  w.table = 0.2;
  CHECK(overall_score(0.1, 0.9, 0.8, w) == doctest::Approx(88.0));
  w.table = 0.4;
  CHECK_THROWS_AS(overall_score(0.0, 1.0, 1.0, w), std::invalid_argument);
}

TEST_CASE("document evaluation scores a perfect prediction at 100") {
  PageDocument gt;
  gt.page_index = 0;
  gt.width_px = gt.height_px = 1000;
  auto text_el = element(0, Category::Text, box(0, 0, 100, 40), 0);
  text_el.content = ContentPayload{ContentKind::PlainText, "hello world"};
  auto formula_el = element(1, Category::DisplayFormula, box(0, 60, 100, 100), 1);
  formula_el.content = ContentPayload{ContentKind::FormulaLatex, "\\frac{a}{b}"};
  auto table_el = element(2, Category::Table, box(0, 120, 100, 200), 2);
  table_el.content = ContentPayload{ContentKind::TableHtml,
                                    "<table><tr><td>a</td><td>b</td></tr></table>"};
  gt.elements = {text_el, formula_el, table_el};

  std::vector<PageMetrics> per_page;
  const auto report = evaluate_documents({gt}, {gt}, {}, &per_page);
  CHECK(report.overall == doctest::Approx(100.0));
  CHECK(report.text_edit == 0.0);
  CHECK(report.formula_proxy == 1.0);
  CHECK(report.table_teds == 1.0);
  CHECK(report.reading_order_edit == 0.0);
  REQUIRE(per_page.size() == 1);
  CHECK(per_page[0].report.overall == doctest::Approx(100.0));
}

TEST_CASE("missing pages and malformed predicted tables score zero") {
  PageDocument gt;
  gt.page_index = 3;
  gt.width_px = gt.height_px = 1000;
  auto table_el = element(0, Category::Table, box(0, 0, 100, 100), 0);
  table_el.content = ContentPayload{ContentKind::TableHtml,
                                    "<table><tr><td>a</td></tr></table>"};
  gt.elements = {table_el};

  // Prediction set has no page 3 at all.
  const auto missing = evaluate_documents({}, {gt}, {});
  CHECK(missing.table_teds == 0.0);
  CHECK(missing.reading_order_edit == 1.0);

  PageDocument pred = gt;
  pred.elements[0].content = ContentPayload{ContentKind::TableHtml, "<table><td>"};
  const auto malformed = evaluate_documents({pred}, {gt}, {});
  CHECK(malformed.table_teds == 0.0);
  CHECK(malformed.table_teds_s == 0.0);
}

TEST_CASE("empty modalities fall back to their defaults") {
  PageDocument gt;
  gt.page_index = 0;
  gt.width_px = gt.height_px = 100;
  const auto report = evaluate_documents({gt}, {gt}, {});
  CHECK(report.text_edit == 0.0);
  CHECK(report.formula_proxy == 1.0);
  CHECK(report.table_teds == 1.0);
  CHECK(report.overall == doctest::Approx(100.0));
}

TEST_CASE("report serialization") {
  MetricReport r;
  const std::string json = report_to_json(r, {});
  CHECK(json.find("\"overall\"") != std::string::npos);
  CHECK(json.find("formula_proxy_non_cdm") != std::string::npos);
  CHECK(json.find("\"pages\"") != std::string::npos);
  const std::string table = report_to_table(r);
  CHECK(table.find("Overall") != std::string::npos);
  CHECK(table.find("Table^TEDS-S") != std::string::npos);
  CHECK(table.find("Reading Order^Edit") != std::string::npos);
}
