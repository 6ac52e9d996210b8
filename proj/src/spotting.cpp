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

#include "docparse/spotting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace docparse {

int quantize(double coord, bool* clamped) {
  if (!std::isfinite(coord)) throw std::invalid_argument("non-finite coordinate");
  double c = coord;
  if (c < 0.0 || c > 1.0) {
    c = std::clamp(c, 0.0, 1.0);
    if (clamped) *clamped = true;
  }
  // std::round ties away from zero, matching the stated rule.
  const double idx = std::round(c * static_cast<double>(kLocGridMax));
  return static_cast<int>(std::clamp(idx, 0.0, static_cast<double>(kLocGridMax)));
}

double dequantize(int index, double extent_px) {
  if (index < 0 || index > kLocGridMax) {
    throw std::out_of_range("grid index " + std::to_string(index) + " outside 0.." +
                            std::to_string(kLocGridMax));
  }
  if (!(extent_px > 0.0)) throw std::invalid_argument("extent must be positive");
  return static_cast<double>(index) / static_cast<double>(kLocGridMax) * extent_px;
}

GridQuad quantize_quad(const std::array<std::array<double, 2>, 4>& pixel_quad, double width_px,
                       double height_px, bool* clamped) {
  if (!(width_px > 0.0) || !(height_px > 0.0)) {
    throw std::invalid_argument("image extents must be positive");
  }
  GridQuad q;
  for (size_t i = 0; i < 4; ++i) {
    q.v[i][0] = quantize(pixel_quad[i][0] / width_px, clamped);
    q.v[i][1] = quantize(pixel_quad[i][1] / height_px, clamped);
  }
  return q;
}

namespace {

std::string loc_token(int k) { return "<LOC_" + std::to_string(k) + ">"; }

// Matches one "<LOC_k>" token at position pos; on success stores the grid
// value and the position just past the token.
bool match_loc_token(const std::string& s, size_t pos, int* value, size_t* end) {
  static constexpr char kPrefix[] = "<LOC_";
  static constexpr size_t kPrefixLen = 5;
  if (s.compare(pos, kPrefixLen, kPrefix) != 0) return false;
  size_t p = pos + kPrefixLen;
  size_t digits_start = p;
  long v = 0;
  while (p < s.size() && s[p] >= '0' && s[p] <= '9' && p - digits_start < 5) {
    v = v * 10 + (s[p] - '0');
    ++p;
  }
  if (p == digits_start) return false;
  if (p >= s.size() || s[p] != '>') return false;
  if (v > kLocGridMax) return false;
  *value = static_cast<int>(v);
  *end = p + 1;
  return true;
}

std::string trim_segment(std::string text, const CodecOptions& options) {
  if (options.trim_trailing_space && !text.empty() && text.back() == ' ') {
    text.pop_back();
  }
  return text;
}

}  // namespace

std::string encode(const std::vector<TextInstance>& instances) {
  std::string out;
  for (const auto& inst : instances) {
    if (inst.text.empty()) throw std::invalid_argument("text instance with empty text");
    if (inst.text.find("<LOC_") != std::string::npos) {
      int v;
      size_t end;
      for (size_t p = inst.text.find("<LOC_"); p != std::string::npos;
           p = inst.text.find("<LOC_", p + 1)) {
        if (match_loc_token(inst.text, p, &v, &end)) {
          throw std::invalid_argument("instance text contains a LOC token");
        }
      }
    }
    for (const auto& vertex : inst.quad.v) {
      for (int coord : vertex) {
        if (coord < 0 || coord > kLocGridMax) {
          throw std::invalid_argument("grid coordinate outside 0..1000");
        }
      }
    }
    out += inst.text;
    for (const auto& vertex : inst.quad.v) {
      out += loc_token(vertex[0]);
      out += loc_token(vertex[1]);
    }
  }
  return out;
}

DecodeResult decode(const std::string& sequence, const CodecOptions& options) {
  DecodeResult result;
  size_t text_start = 0;
  size_t pos = 0;
  while (pos < sequence.size()) {
    int value;
    size_t tok_end;
    if (sequence[pos] != '<' || !match_loc_token(sequence, pos, &value, &tok_end)) {
      ++pos;
      continue;
    }
    // A token run starts here; collect every consecutive token.
    const size_t run_start = pos;
    std::vector<int> run;
    size_t run_end = pos;
    while (run_end < sequence.size() && match_loc_token(sequence, run_end, &value, &run_end)) {
      run.push_back(value);
    }
    const std::string text =
        trim_segment(sequence.substr(text_start, run_start - text_start), options);
    if (run.size() != 8) {
      result.faults.push_back({run_start, "run of " + std::to_string(run.size()) +
                                              " LOC tokens, expected 8"});
    } else if (text.empty()) {
      result.faults.push_back({run_start, "location run with empty text segment"});
    } else {
      TextInstance inst;
      inst.text = text;
      for (size_t i = 0; i < 4; ++i) {
        inst.quad.v[i][0] = run[2 * i];
        inst.quad.v[i][1] = run[2 * i + 1];
      }
      result.instances.push_back(std::move(inst));
    }
    text_start = run_end;
    pos = run_end;
  }
  const std::string tail = trim_segment(sequence.substr(text_start), options);
  if (!tail.empty()) {
    result.faults.push_back({text_start, "dangling text segment without location tokens"});
  }
  return result;
}

std::vector<SpottingRecord> load_spotting_jsonl(const std::string& path,
                                                const CodecOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spotting file: " + path);
  std::vector<SpottingRecord> records;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("spotting file line " + std::to_string(lineno) + ": " + e.what());
    }
    SpottingRecord rec;
    rec.image = obj.value("image", std::string());
    rec.width_px = obj.value("width_px", int64_t{0});
    rec.height_px = obj.value("height_px", int64_t{0});
    if (obj.contains("raw")) {
      DecodeResult decoded = decode(obj.at("raw").get<std::string>(), options);
      rec.instances = std::move(decoded.instances);
      rec.faults = std::move(decoded.faults);
    } else if (obj.contains("instances")) {
      for (const auto& inst : obj.at("instances")) {
        TextInstance t;
        t.text = inst.at("text").get<std::string>();
        const auto& quad = inst.at("quad");
        if (!quad.is_array() || quad.size() != 4) {
          throw std::runtime_error("spotting file line " + std::to_string(lineno) +
                                   ": quad must have 4 points");
        }
        for (size_t i = 0; i < 4; ++i) {
          t.quad.v[i][0] = quad[i][0].get<int>();
          t.quad.v[i][1] = quad[i][1].get<int>();
        }
        rec.instances.push_back(std::move(t));
      }
    } else {
      throw std::runtime_error("spotting file line " + std::to_string(lineno) +
                               ": need \"raw\" or \"instances\"");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace docparse
