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
#include <string>
#include <vector>

namespace docparse {

/// Decodes UTF-8 into Unicode scalar values. Invalid byte sequences are
/// mapped to U+FFFD one byte at a time (never throws).
std::vector<char32_t> utf8_to_codepoints(const std::string& s);

/// Levenshtein distance between two symbol sequences (unit costs).
template <typename T>
size_t levenshtein(const std::vector<T>& a, const std::vector<T>& b) {
  const size_t m = a.size();
  const size_t n = b.size();
  if (m == 0) return n;
  if (n == 0) return m;
  std::vector<size_t> row(n + 1);
  for (size_t j = 0; j <= n; ++j) row[j] = j;
  for (size_t i = 1; i <= m; ++i) {
    size_t diag = row[0];
    row[0] = i;
    for (size_t j = 1; j <= n; ++j) {
      const size_t up = row[j];
      const size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({sub, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[n];
}

/// Levenshtein distance over Unicode scalar values of two UTF-8 strings.
size_t edit_distance(const std::string& a, const std::string& b);

/// dist / max(|a|,|b|); 0 when both are empty. Always in [0,1].
double normalized_edit_distance(const std::string& a, const std::string& b);

template <typename T>
double normalized_edit_distance_seq(const std::vector<T>& a, const std::vector<T>& b) {
  const size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

}  // namespace docparse
