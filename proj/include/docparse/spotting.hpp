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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace docparse {

/// Number of bins on the location grid: tokens <LOC_0> .. <LOC_1000>.
inline constexpr int kLocGridMax = 1000;

/// Four text-region vertices in fixed order TL, TR, BR, BL on the integer
/// location grid 0..1000. x and y are normalized by image width and height
/// separately before quantization.
struct GridQuad {
  // (x, y) per vertex: TL, TR, BR, BL.
  std::array<std::array<int, 2>, 4> v{};
  bool operator==(const GridQuad&) const = default;
};

struct TextInstance {
  std::string text;  // non-empty, must not contain LOC-token substrings
  GridQuad quad;
  bool operator==(const TextInstance&) const = default;
};

struct DecodeFault {
  size_t byte_offset = 0;
  std::string message;
};

struct DecodeResult {
  std::vector<TextInstance> instances;
  std::vector<DecodeFault> faults;
};

struct CodecOptions {
  /// Strip one trailing space from each text segment (model outputs
  /// sometimes pad before the token run).
  bool trim_trailing_space = true;
};

/// Quantizes a normalized coordinate onto the 0..1000 grid:
/// round(coord * 1000), ties away from zero. Values outside [0,1] are
/// clamped first; *clamped is set when provided. Throws on non-finite input.
int quantize(double coord, bool* clamped = nullptr);

/// Inverse map: pixel = index/1000 * extent_px. Throws on out-of-range index.
double dequantize(int index, double extent_px);

/// Quantizes pixel-space quad vertices onto the grid (x by width, y by height).
GridQuad quantize_quad(const std::array<std::array<double, 2>, 4>& pixel_quad, double width_px,
                       double height_px, bool* clamped = nullptr);

/// Serializes instances in input order: each text followed by the eight
/// tokens <LOC_xTL><LOC_yTL><LOC_xTR><LOC_yTR><LOC_xBR><LOC_yBR><LOC_xBL><LOC_yBL>.
/// Throws std::invalid_argument on empty text or text containing a LOC token.
std::string encode(const std::vector<TextInstance>& instances);

/// Fault-tolerant greedy left-to-right parse. A run of exactly 8 consecutive
/// LOC tokens closes the preceding text segment into an instance; malformed
/// runs (1-7 or >8 tokens, or a run with empty text) are reported as faults,
/// their tokens discarded, and parsing resumes. Never throws on any byte input.
DecodeResult decode(const std::string& sequence, const CodecOptions& options = {});

/// One line of a spotting prediction file: either raw model output (decoded
/// here) or already-structured instances.
struct SpottingRecord {
  std::string image;
  int64_t width_px = 0;
  int64_t height_px = 0;
  std::vector<TextInstance> instances;
  std::vector<DecodeFault> faults;
};

/// JSON-lines spotting file: each line is
/// {"image": str, "width_px": int, "height_px": int, "raw": str} or
/// {"image": str, "instances": [{"text": str, "quad": [[x,y] x4]}]}.
std::vector<SpottingRecord> load_spotting_jsonl(const std::string& path,
                                                const CodecOptions& options = {});

}  // namespace docparse
