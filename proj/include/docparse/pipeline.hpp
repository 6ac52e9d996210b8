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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "docparse/core.hpp"
#include "docparse/reading_order.hpp"

namespace docparse {

/// Dynamic batching policy: a batch launches when the queue holds capacity
/// items, or when the oldest queued item has waited max_wait_ms.
struct BatchPolicy {
  size_t capacity = 16;
  double max_wait_ms = 50.0;
};

struct BatchDecision {
  bool launch = false;
  size_t count = 0;  // up to capacity oldest items, FIFO order
  /// When not launching, the time at which the wait trigger would fire
  /// (oldest enqueue + max_wait); unset for an empty queue.
  std::optional<double> next_deadline_ms;
};

/// Pure batching decision over the enqueue timestamps of the queued items
/// (FIFO order, milliseconds on any consistent clock).
BatchDecision batch_collect(const std::vector<double>& enqueue_times_ms, double now_ms,
                            const BatchPolicy& policy);

/// Pre-rendered page descriptor entering the pipeline.
struct PageInput {
  int64_t page_id = 0;
  int64_t width_px = 0;
  int64_t height_px = 0;
  /// Synthetic block count hint for mock backends.
  size_t block_hint = 1;
};

struct LayoutResult {
  std::vector<LayoutElement> elements;
  std::optional<RelationMatrix> relations;
};

/// One element crop descriptor handed to the recognition stage. The runtime
/// never touches pixels; a real model adapter does its own cropping.
struct BlockDescriptor {
  int64_t page_id = 0;
  int64_t element_id = 0;
  Category category = Category::Text;
  Polygon polygon;
};

struct RecognitionOutput {
  std::optional<ContentPayload> content;
  size_t token_count = 0;
};

/// Pluggable backend: stage hooks for input preparation, layout analysis,
/// and batched recognition. recognize() must return one output per input
/// descriptor, positionally aligned.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual void prepare(PageInput& page) { (void)page; }
  virtual LayoutResult analyze_layout(const PageInput& page) = 0;
  virtual std::vector<RecognitionOutput> recognize(const std::vector<BlockDescriptor>& batch) = 0;
};

struct RunStats {
  double total_time_s = 0.0;
  double pages_per_s = 0.0;
  double tokens_per_s = 0.0;
  size_t pages = 0;
  size_t total_tokens = 0;
  size_t failed = 0;
  size_t recognition_calls = 0;
  double stage_busy_s[3] = {0.0, 0.0, 0.0};
  std::map<size_t, size_t> batch_histogram;  // batch size -> launches
};

std::string run_stats_to_json(const RunStats& stats);

struct ParsedPage {
  int64_t page_id = 0;
  PageDocument page;
  bool failed = false;
  std::string error;
};

struct RunConfig {
  BatchPolicy policy;
  size_t queue_capacity = 64;
  size_t recognition_workers = 1;
};

struct RunResult {
  std::vector<ParsedPage> pages;  // sorted by page_id
  RunStats stats;
};

/// Executes the three-stage pipeline over the inputs: preparation, layout
/// analysis and batched recognition run concurrently, connected by bounded
/// FIFO queues. Every input appears exactly once in the output, re-sequenced
/// by page_id; backend failures mark the affected pages failed and the run
/// continues.
RunResult run_pipeline(std::vector<PageInput> inputs, Backend& backend, const RunConfig& config);

/// Deterministic synthetic backend: fixed per-stage latencies (real sleeps),
/// seeded jitter-free payloads, fixed token count per block.
struct MockLatency {
  double prep_ms = 0.0;
  double layout_ms = 0.0;
  double recognition_ms = 0.0;  // per recognize() call
};

std::unique_ptr<Backend> make_mock_backend(const MockLatency& latency, uint64_t seed,
                                           size_t tokens_per_block = 32);

/// Oracle backend replaying ground-truth pages: layout returns the GT
/// elements (reading order kept or stripped), recognition returns the GT
/// content verbatim. Throws std::out_of_range for a page_id missing from
/// the GT. When strip_order is set, layout emits margin-matrix relations so
/// the voting stage must reconstruct the order.
std::unique_ptr<Backend> make_playback_backend(std::vector<PageDocument> gt,
                                               bool strip_order = false);

}  // namespace docparse
