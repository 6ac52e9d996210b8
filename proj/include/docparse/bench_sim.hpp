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
#include <vector>

#include "docparse/pipeline.hpp"

namespace docparse {

/// Per-page stage service times for the simulated pipeline, milliseconds.
struct StageLatency {
  double prep_ms = 10.0;
  double layout_ms = 20.0;
  /// Recognition cost per launched batch; per_item_ms adds on top per page.
  double recognition_batch_ms = 0.0;
  double recognition_per_item_ms = 15.0;
};

struct SimConfig {
  size_t pages = 0;
  StageLatency latency;
  BatchPolicy policy;
  size_t queue_capacity = 64;
  size_t tokens_per_page = 32;
  /// Sequential mode runs the three stages back to back per page with no
  /// overlap, as the non-pipelined baseline.
  bool pipelined = true;
};

struct BatchLaunch {
  double time_ms = 0.0;
  size_t size = 0;
};

/// Deterministic discrete-event simulation of the three-stage pipeline
/// under a virtual clock. Returns throughput stats in the same shape as
/// the real runtime.
RunStats simulate_pipeline(const SimConfig& config);

/// Replays the batching policy alone over scripted arrival times (ms),
/// virtual clock, zero service time. Returns every launch with its time
/// and size.
std::vector<BatchLaunch> simulate_batching(const std::vector<double>& arrival_times_ms,
                                           const BatchPolicy& policy);

}  // namespace docparse
