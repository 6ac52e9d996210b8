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

#include "docparse/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <json.hpp>

namespace docparse {

BatchDecision batch_collect(const std::vector<double>& enqueue_times_ms, double now_ms,
                            const BatchPolicy& policy) {
  BatchDecision d;
  if (enqueue_times_ms.empty()) return d;
  const double oldest = enqueue_times_ms.front();
  if (enqueue_times_ms.size() >= policy.capacity || now_ms - oldest >= policy.max_wait_ms) {
    d.launch = true;
    d.count = std::min(enqueue_times_ms.size(), policy.capacity);
    return d;
  }
  d.next_deadline_ms = oldest + policy.max_wait_ms;
  return d;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start, Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(t - start).count();
}

/// Bounded FIFO for one producer and one consumer; close() signals
/// end-of-stream.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(size_t capacity) : capacity_(capacity) {}

  void push(T item) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return items_.size() < capacity_; });
    items_.push_back(std::move(item));
    not_empty_.notify_one();
  }

  bool pop(T* out) {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return false;
    *out = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return true;
  }

  /// Waits up to timeout for an item; returns false without closing state
  /// change on timeout. *closed reports end-of-stream with an empty queue.
  bool pop_for(T* out, std::chrono::duration<double, std::milli> timeout, bool* closed) {
    std::unique_lock lock(mu_);
    not_empty_.wait_for(lock, timeout, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) {
      *closed = closed_;
      return false;
    }
    *out = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return true;
  }

  bool try_pop(T* out) {
    std::lock_guard lock(mu_);
    if (items_.empty()) return false;
    *out = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return true;
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
  }

 private:
  size_t capacity_;
  std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<T> items_;
  bool closed_ = false;
};

struct QueuedBlock {
  BlockDescriptor block;
  size_t element_index = 0;
  double enqueue_ms = 0.0;
};

struct PendingPage {
  ParsedPage parsed;
  size_t remaining = 0;
};

struct Shared {
  std::mutex mu;
  std::unordered_map<int64_t, PendingPage> pending;
  std::vector<ParsedPage> done;
  RunStats stats;

  void finish_locked(int64_t page_id) {
    auto it = pending.find(page_id);
    if (it != pending.end() && it->second.remaining == 0) {
      done.push_back(std::move(it->second.parsed));
      pending.erase(it);
    }
  }
};

void sleep_ms(double ms) {
  if (ms > 0.0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
}

}  // namespace

RunResult run_pipeline(std::vector<PageInput> inputs, Backend& backend, const RunConfig& config) {
  const size_t queue_cap = std::max<size_t>(1, config.queue_capacity);
  BoundedQueue<PageInput> prep_to_layout(queue_cap);
  BoundedQueue<QueuedBlock> layout_to_recog(queue_cap);
  BoundedQueue<std::vector<QueuedBlock>> batches(std::max<size_t>(1, config.recognition_workers) *
                                                 2);
  Shared shared;
  const auto t0 = Clock::now();
  const size_t page_count = inputs.size();

  std::thread prep_thread([&] {
    for (auto& input : inputs) {
      const auto s = Clock::now();
      try {
        backend.prepare(input);
      } catch (const std::exception& e) {
        std::lock_guard lock(shared.mu);
        shared.stats.stage_busy_s[0] +=
            std::chrono::duration<double>(Clock::now() - s).count();
        shared.done.push_back({input.page_id, {}, true, std::string("prepare: ") + e.what()});
        ++shared.stats.failed;
        continue;
      }
      {
        std::lock_guard lock(shared.mu);
        shared.stats.stage_busy_s[0] += std::chrono::duration<double>(Clock::now() - s).count();
      }
      prep_to_layout.push(input);
    }
    prep_to_layout.close();
  });

  std::thread layout_thread([&] {
    PageInput input;
    while (prep_to_layout.pop(&input)) {
      const auto s = Clock::now();
      LayoutResult layout;
      try {
        layout = backend.analyze_layout(input);
      } catch (const std::exception& e) {
        std::lock_guard lock(shared.mu);
        shared.stats.stage_busy_s[1] += std::chrono::duration<double>(Clock::now() - s).count();
        shared.done.push_back({input.page_id, {}, true, std::string("layout: ") + e.what()});
        ++shared.stats.failed;
        continue;
      }

      PageDocument page;
      page.page_index = input.page_id;
      page.width_px = input.width_px;
      page.height_px = input.height_px;
      page.elements = std::move(layout.elements);
      if (layout.relations && layout.relations->size() == page.elements.size()) {
        const ReadingOrder order = vote(*layout.relations);
        for (size_t k = 0; k < order.ranks.size(); ++k) {
          page.elements[order.ranks[k]].order = static_cast<int64_t>(k);
        }
      }
      {
        std::lock_guard lock(shared.mu);
        shared.stats.stage_busy_s[1] += std::chrono::duration<double>(Clock::now() - s).count();
      }

      if (page.elements.empty()) {
        std::lock_guard lock(shared.mu);
        shared.done.push_back({input.page_id, std::move(page), false, ""});
        continue;
      }

      {
        std::lock_guard lock(shared.mu);
        PendingPage pp;
        pp.parsed = {input.page_id, page, false, ""};
        pp.remaining = page.elements.size();
        shared.pending.emplace(input.page_id, std::move(pp));
      }
      for (size_t ei = 0; ei < page.elements.size(); ++ei) {
        const LayoutElement& el = page.elements[ei];
        QueuedBlock qb;
        qb.block = {input.page_id, el.id, el.category, el.polygon};
        qb.element_index = ei;
        qb.enqueue_ms = ms_since(t0, Clock::now());
        layout_to_recog.push(std::move(qb));
      }
    }
    layout_to_recog.close();
  });

  auto execute_batch = [&](std::vector<QueuedBlock> batch) {
    std::vector<BlockDescriptor> descriptors;
    descriptors.reserve(batch.size());
    for (const auto& qb : batch) descriptors.push_back(qb.block);
    const auto s = Clock::now();
    std::vector<RecognitionOutput> outputs;
    std::string error;
    try {
      outputs = backend.recognize(descriptors);
      if (outputs.size() != descriptors.size()) {
        error = "recognition output misaligned with batch";
        outputs.clear();
      }
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double busy = std::chrono::duration<double>(Clock::now() - s).count();

    std::lock_guard lock(shared.mu);
    shared.stats.stage_busy_s[2] += busy;
    ++shared.stats.recognition_calls;
    ++shared.stats.batch_histogram[batch.size()];
    for (size_t i = 0; i < batch.size(); ++i) {
      auto it = shared.pending.find(batch[i].block.page_id);
      if (it == shared.pending.end()) continue;
      PendingPage& pp = it->second;
      if (error.empty()) {
        const RecognitionOutput& out = outputs[i];
        pp.parsed.page.elements[batch[i].element_index].content = out.content;
        shared.stats.total_tokens += out.token_count;
      } else if (!pp.parsed.failed) {
        pp.parsed.failed = true;
        pp.parsed.error = "recognition: " + error;
        ++shared.stats.failed;
      }
      if (--pp.remaining == 0) shared.finish_locked(batch[i].block.page_id);
    }
  };

  std::vector<std::thread> workers;
  const size_t worker_count = std::max<size_t>(1, config.recognition_workers);
  for (size_t w = 0; w < worker_count; ++w) {
    workers.emplace_back([&] {
      std::vector<QueuedBlock> batch;
      while (batches.pop(&batch)) execute_batch(std::move(batch));
    });
  }

  std::thread dispatcher([&] {
    std::deque<QueuedBlock> staged;
    bool upstream_closed = false;
    while (true) {
      // Drain whatever is immediately available.
      QueuedBlock qb;
      while (layout_to_recog.try_pop(&qb)) staged.push_back(std::move(qb));

      std::vector<double> times;
      times.reserve(staged.size());
      for (const auto& b : staged) times.push_back(b.enqueue_ms);
      const double now_ms = ms_since(t0, Clock::now());
      const BatchDecision decision = batch_collect(times, now_ms, config.policy);

      if (decision.launch) {
        std::vector<QueuedBlock> batch;
        batch.reserve(decision.count);
        for (size_t i = 0; i < decision.count; ++i) {
          batch.push_back(std::move(staged.front()));
          staged.pop_front();
        }
        batches.push(std::move(batch));
        continue;
      }
      if (upstream_closed) {
        if (staged.empty()) break;
        // Flush the remainder at end-of-stream.
        std::vector<QueuedBlock> batch(staged.begin(), staged.end());
        staged.clear();
        batches.push(std::move(batch));
        continue;
      }
      const double wait_ms =
          decision.next_deadline_ms ? std::max(0.1, *decision.next_deadline_ms - now_ms) : 50.0;
      bool closed = false;
      if (layout_to_recog.pop_for(&qb, std::chrono::duration<double, std::milli>(wait_ms),
                                  &closed)) {
        staged.push_back(std::move(qb));
      } else if (closed) {
        upstream_closed = true;
      }
    }
    batches.close();
  });

  prep_thread.join();
  layout_thread.join();
  dispatcher.join();
  for (auto& w : workers) w.join();

  RunResult result;
  {
    std::lock_guard lock(shared.mu);
    result.pages = std::move(shared.done);
    result.stats = shared.stats;
  }
  std::sort(result.pages.begin(), result.pages.end(),
            [](const ParsedPage& a, const ParsedPage& b) { return a.page_id < b.page_id; });
  result.stats.pages = page_count;
  result.stats.total_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  if (result.stats.total_time_s > 0.0 && page_count > 0) {
    result.stats.pages_per_s = static_cast<double>(page_count) / result.stats.total_time_s;
    result.stats.tokens_per_s =
        static_cast<double>(result.stats.total_tokens) / result.stats.total_time_s;
  }
  return result;
}

std::string run_stats_to_json(const RunStats& stats) {
  nlohmann::ordered_json root;
  root["total_time_s"] = stats.total_time_s;
  root["pages_per_s"] = stats.pages_per_s;
  root["tokens_per_s"] = stats.tokens_per_s;
  root["pages"] = stats.pages;
  root["total_tokens"] = stats.total_tokens;
  root["failed"] = stats.failed;
  root["recognition_calls"] = stats.recognition_calls;
  root["stage_busy_s"] = {stats.stage_busy_s[0], stats.stage_busy_s[1], stats.stage_busy_s[2]};
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (const auto& [size, count] : stats.batch_histogram) hist[std::to_string(size)] = count;
  root["batch_histogram"] = std::move(hist);
  return root.dump(2) + "\n";
}

namespace {

class MockBackend : public Backend {
 public:
  MockBackend(const MockLatency& latency, uint64_t seed, size_t tokens_per_block)
      : latency_(latency), seed_(seed), tokens_per_block_(tokens_per_block) {}

  void prepare(PageInput& page) override {
    sleep_ms(latency_.prep_ms);
    (void)page;
  }

  LayoutResult analyze_layout(const PageInput& page) override {
    sleep_ms(latency_.layout_ms);
    LayoutResult result;
    const size_t blocks = std::max<size_t>(1, page.block_hint);
    const double band = static_cast<double>(page.height_px) / static_cast<double>(blocks);
    for (size_t i = 0; i < blocks; ++i) {
      LayoutElement el;
      el.id = static_cast<int64_t>(i);
      el.category = Category::Text;
      el.polygon.points = {{0.0, band * static_cast<double>(i)},
                           {static_cast<double>(page.width_px),
                            band * static_cast<double>(i + 1)}};
      el.confidence = 1.0;
      el.order = static_cast<int64_t>(i);
      result.elements.push_back(std::move(el));
    }
    return result;
  }

  std::vector<RecognitionOutput> recognize(const std::vector<BlockDescriptor>& batch) override {
    sleep_ms(latency_.recognition_ms);
    std::vector<RecognitionOutput> outputs;
    outputs.reserve(batch.size());
    for (const auto& block : batch) {
      RecognitionOutput out;
      out.content = ContentPayload{ContentKind::PlainText,
                                   "mock p" + std::to_string(block.page_id) + " e" +
                                       std::to_string(block.element_id) + " s" +
                                       std::to_string(seed_)};
      out.token_count = tokens_per_block_;
      outputs.push_back(std::move(out));
    }
    return outputs;
  }

 private:
  MockLatency latency_;
  uint64_t seed_;
  size_t tokens_per_block_;
};

class PlaybackBackend : public Backend {
 public:
  PlaybackBackend(std::vector<PageDocument> gt, bool strip_order) : strip_order_(strip_order) {
    for (auto& page : gt) {
      const int64_t idx = page.page_index;
      pages_.emplace(idx, std::move(page));
    }
  }

  LayoutResult analyze_layout(const PageInput& page) override {
    const PageDocument& gt = page_for(page.page_id);
    LayoutResult result;
    for (const auto& el : gt.elements) {
      LayoutElement copy = el;
      copy.content.reset();
      if (strip_order_) copy.order = 0;
      result.elements.push_back(std::move(copy));
    }
    if (strip_order_ && !result.elements.empty()) {
      // Reading order must be reconstructed by the voting stage.
      std::vector<size_t> perm(result.elements.size());
      for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
      std::stable_sort(perm.begin(), perm.end(), [&](size_t a, size_t b) {
        return gt.elements[a].order < gt.elements[b].order;
      });
      result.relations = order_from_margin_matrix(perm, 2.0);
    }
    return result;
  }

  std::vector<RecognitionOutput> recognize(const std::vector<BlockDescriptor>& batch) override {
    std::vector<RecognitionOutput> outputs;
    outputs.reserve(batch.size());
    for (const auto& block : batch) {
      const PageDocument& gt = page_for(block.page_id);
      RecognitionOutput out;
      for (const auto& el : gt.elements) {
        if (el.id == block.element_id) {
          out.content = el.content;
          if (el.content) out.token_count = el.content->value.size() / 4 + 1;
          break;
        }
      }
      outputs.push_back(std::move(out));
    }
    return outputs;
  }

 private:
  const PageDocument& page_for(int64_t page_id) const {
    const auto it = pages_.find(page_id);
    if (it == pages_.end()) {
      throw std::out_of_range("ground truth missing page " + std::to_string(page_id));
    }
    return it->second;
  }

  std::unordered_map<int64_t, PageDocument> pages_;
  bool strip_order_;
};

}  // namespace

std::unique_ptr<Backend> make_mock_backend(const MockLatency& latency, uint64_t seed,
                                           size_t tokens_per_block) {
  return std::make_unique<MockBackend>(latency, seed, tokens_per_block);
}

std::unique_ptr<Backend> make_playback_backend(std::vector<PageDocument> gt, bool strip_order) {
  return std::make_unique<PlaybackBackend>(std::move(gt), strip_order);
}

}  // namespace docparse
