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

#include "docparse/bench_sim.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace docparse {

std::vector<BatchLaunch> simulate_batching(const std::vector<double>& arrival_times_ms,
                                           const BatchPolicy& policy) {
  std::vector<double> arrivals = arrival_times_ms;
  std::sort(arrivals.begin(), arrivals.end());
  std::vector<BatchLaunch> launches;
  std::deque<double> queue;
  size_t next = 0;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  while (next < arrivals.size() || !queue.empty()) {
    const double next_arrival = next < arrivals.size() ? arrivals[next] : kInf;
    const double deadline = queue.empty() ? kInf : queue.front() + policy.max_wait_ms;
    const double now = std::min(next_arrival, deadline);
    while (next < arrivals.size() && arrivals[next] <= now) queue.push_back(arrivals[next++]);
    while (true) {
      const std::vector<double> times(queue.begin(), queue.end());
      const BatchDecision d = batch_collect(times, now, policy);
      if (!d.launch) break;
      launches.push_back({now, d.count});
      for (size_t i = 0; i < d.count; ++i) queue.pop_front();
    }
  }
  return launches;
}

RunStats simulate_pipeline(const SimConfig& config) {
  RunStats stats;
  stats.pages = config.pages;
  stats.total_tokens = config.pages * config.tokens_per_page;
  if (config.pages == 0) return stats;

  const StageLatency& lat = config.latency;

  if (!config.pipelined) {
    double total_ms = 0.0;
    for (size_t p = 0; p < config.pages; ++p) {
      total_ms += lat.prep_ms + lat.layout_ms + lat.recognition_batch_ms +
                  lat.recognition_per_item_ms;
    }
    stats.total_time_s = total_ms / 1000.0;
    stats.stage_busy_s[0] = config.pages * lat.prep_ms / 1000.0;
    stats.stage_busy_s[1] = config.pages * lat.layout_ms / 1000.0;
    stats.stage_busy_s[2] =
        config.pages * (lat.recognition_batch_ms + lat.recognition_per_item_ms) / 1000.0;
    stats.recognition_calls = config.pages;
    stats.batch_histogram[1] = config.pages;
    stats.pages_per_s = static_cast<double>(config.pages) / stats.total_time_s;
    stats.tokens_per_s = static_cast<double>(stats.total_tokens) / stats.total_time_s;
    return stats;
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const size_t cap = std::max<size_t>(1, config.queue_capacity);

  size_t source_remaining = config.pages;
  std::deque<double> prep_queue;    // enqueue times into the prep->layout buffer
  std::deque<double> layout_queue;  // enqueue times into the layout->recognition buffer
  bool busy[3] = {false, false, false};
  double done_at[3] = {kInf, kInf, kInf};
  size_t batch_in_flight = 0;
  size_t completed = 0;
  double now = 0.0;
  double finish_ms = 0.0;

  auto scan = [&] {
    bool progress = true;
    while (progress) {
      progress = false;
      // Stage 1: input preparation. Space in the downstream buffer is
      // required before service starts, so the bound is never exceeded.
      if (!busy[0] && source_remaining > 0 && prep_queue.size() < cap) {
        busy[0] = true;
        done_at[0] = now + lat.prep_ms;
        stats.stage_busy_s[0] += lat.prep_ms / 1000.0;
        --source_remaining;
        progress = true;
      }
      // Stage 2: layout analysis.
      if (!busy[1] && !prep_queue.empty() && layout_queue.size() < cap) {
        prep_queue.pop_front();
        busy[1] = true;
        done_at[1] = now + lat.layout_ms;
        stats.stage_busy_s[1] += lat.layout_ms / 1000.0;
        progress = true;
      }
      // Stage 3: batched recognition.
      if (!busy[2] && !layout_queue.empty()) {
        const std::vector<double> times(layout_queue.begin(), layout_queue.end());
        const BatchDecision d = batch_collect(times, now, config.policy);
        if (d.launch) {
          for (size_t i = 0; i < d.count; ++i) layout_queue.pop_front();
          const double service =
              lat.recognition_batch_ms + lat.recognition_per_item_ms * static_cast<double>(d.count);
          busy[2] = true;
          done_at[2] = now + service;
          stats.stage_busy_s[2] += service / 1000.0;
          batch_in_flight = d.count;
          ++stats.recognition_calls;
          ++stats.batch_histogram[d.count];
          progress = true;
        }
      }
    }
  };

  scan();
  while (completed < config.pages) {
    double next = std::min({done_at[0], done_at[1], done_at[2]});
    if (!busy[2] && !layout_queue.empty()) {
      next = std::min(next, layout_queue.front() + config.policy.max_wait_ms);
    }
    if (next == kInf) break;  // unreachable for consistent state
    now = next;
    if (busy[0] && done_at[0] <= now) {
      busy[0] = false;
      done_at[0] = kInf;
      prep_queue.push_back(now);
    }
    if (busy[1] && done_at[1] <= now) {
      busy[1] = false;
      done_at[1] = kInf;
      layout_queue.push_back(now);
    }
    if (busy[2] && done_at[2] <= now) {
      busy[2] = false;
      done_at[2] = kInf;
      completed += batch_in_flight;
      batch_in_flight = 0;
      finish_ms = now;
    }
    scan();
  }

  stats.total_time_s = finish_ms / 1000.0;
  if (stats.total_time_s > 0.0) {
    stats.pages_per_s = static_cast<double>(config.pages) / stats.total_time_s;
    stats.tokens_per_s = static_cast<double>(stats.total_tokens) / stats.total_time_s;
  }
  return stats;
}

}  // namespace docparse
