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

#include "docparse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace docparse {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double signed_area(const std::vector<Point>& pts) {
  double s = 0.0;
  const size_t n = pts.size();
  for (size_t i = 0; i < n; ++i) {
    const Point& p = pts[i];
    const Point& q = pts[(i + 1) % n];
    s += p.x * q.y - q.x * p.y;
  }
  return 0.5 * s;
}

std::vector<Point> oriented_ccw(std::vector<Point> pts) {
  if (signed_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());
  return pts;
}

// Proper segment crossing (excluding shared endpoints / collinear touch).
bool segments_cross(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

double polygon_area(const std::vector<Point>& pts) { return std::abs(signed_area(pts)); }

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Point> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool is_convex(const std::vector<Point>& pts) {
  const size_t n = pts.size();
  if (n < 3) return false;
  int sign = 0;
  for (size_t i = 0; i < n; ++i) {
    const double c = cross(pts[i], pts[(i + 1) % n], pts[(i + 2) % n]);
    if (c != 0.0) {
      const int s = c > 0.0 ? 1 : -1;
      if (sign == 0) sign = s;
      else if (s != sign) return false;
    }
  }
  return true;
}

bool is_self_intersecting(const std::vector<Point>& pts) {
  const size_t n = pts.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      // Skip adjacent edges (shared endpoint).
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])) return true;
    }
  }
  return false;
}

std::vector<Point> clip_convex(const std::vector<Point>& subject, const std::vector<Point>& clip) {
  std::vector<Point> output = subject;
  const size_t m = clip.size();
  for (size_t i = 0; i < m && !output.empty(); ++i) {
    const Point& a = clip[i];
    const Point& b = clip[(i + 1) % m];
    std::vector<Point> input;
    input.swap(output);
    const size_t n = input.size();
    for (size_t j = 0; j < n; ++j) {
      const Point& cur = input[j];
      const Point& prev = input[(j + n - 1) % n];
      const double side_cur = cross(a, b, cur);
      const double side_prev = cross(a, b, prev);
      const bool in_cur = side_cur >= 0.0;
      const bool in_prev = side_prev >= 0.0;
      if (in_cur != in_prev) {
        const double t = side_prev / (side_prev - side_cur);
        output.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
      }
      if (in_cur) output.push_back(cur);
    }
  }
  return output;
}

namespace {

std::vector<Point> prepare(const Polygon& poly, std::vector<std::string>* warnings) {
  Polygon p = poly.expanded();
  p.validate();
  if (p.points.size() < 3) {
    throw std::invalid_argument("polygon with fewer than 3 effective vertices");
  }
  if (is_self_intersecting(p.points)) {
    throw std::invalid_argument("self-intersecting polygon rejected");
  }
  if (!is_convex(p.points)) {
    if (warnings) warnings->push_back("non-convex polygon evaluated on its convex hull");
    return oriented_ccw(convex_hull(p.points));
  }
  return oriented_ccw(p.points);
}

}  // namespace

double polygon_iou(const Polygon& a, const Polygon& b, std::vector<std::string>* warnings) {
  const std::vector<Point> pa = prepare(a, warnings);
  const std::vector<Point> pb = prepare(b, warnings);
  const double area_a = polygon_area(pa);
  const double area_b = polygon_area(pb);
  const std::vector<Point> inter = clip_convex(pa, pb);
  const double area_i = inter.size() >= 3 ? polygon_area(inter) : 0.0;
  const double area_u = area_a + area_b - area_i;
  if (!(area_u > 0.0)) throw std::domain_error("degenerate zero-area union");
  return std::clamp(area_i / area_u, 0.0, 1.0);
}

}  // namespace docparse
