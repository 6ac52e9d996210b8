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

#include "docparse/core.hpp"

namespace docparse {

/// Unsigned polygon area via the shoelace formula.
double polygon_area(const std::vector<Point>& pts);

/// Convex hull (monotone chain), counter-clockwise in a y-down coordinate
/// system is irrelevant here; orientation is normalized by callers.
std::vector<Point> convex_hull(std::vector<Point> pts);

bool is_convex(const std::vector<Point>& pts);

/// True when any two non-adjacent edges properly cross.
bool is_self_intersecting(const std::vector<Point>& pts);

/// Intersection of two convex polygons (Sutherland-Hodgman clipping).
std::vector<Point> clip_convex(const std::vector<Point>& subject, const std::vector<Point>& clip);

/// area(intersection) / area(union). 2-point boxes are expanded; convex
/// quads are clipped exactly; non-convex multi-point polygons are evaluated
/// on their convex hulls with a warning. Throws std::invalid_argument on
/// self-intersecting input and std::domain_error on a zero-area union.
double polygon_iou(const Polygon& a, const Polygon& b, std::vector<std::string>* warnings = nullptr);

}  // namespace docparse
