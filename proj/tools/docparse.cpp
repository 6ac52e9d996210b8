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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "docparse/assembler.hpp"
#include "docparse/bench_sim.hpp"
#include "docparse/config.hpp"
#include "docparse/core.hpp"
#include "docparse/metrics.hpp"
#include "docparse/pipeline.hpp"
#include "docparse/spotting.hpp"
#include "docparse/uacs.hpp"

namespace fs = std::filesystem;
using namespace docparse;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartialFailure = 1;
constexpr int kExitUsage = 2;

struct ParseArgs {
  std::string input;
  std::string backend = "playback";
  std::string config_path;
  std::string out_dir = ".";
  size_t mock_pages = 10;
  size_t mock_blocks = 4;
  uint64_t seed = 0;
  bool strip_order = false;
};

RunConfig run_config_from_file(const std::string& path) {
  RunConfig rc;
  if (path.empty()) return rc;
  const ConfigFile cfg = ConfigFile::load(path);
  rc.policy.capacity = static_cast<size_t>(cfg.get_number("pipeline", "batch_capacity", 16));
  rc.policy.max_wait_ms = cfg.get_number("pipeline", "max_wait_ms", 50.0);
  rc.queue_capacity = static_cast<size_t>(cfg.get_number("pipeline", "queue_capacity", 64));
  rc.recognition_workers =
      static_cast<size_t>(cfg.get_number("pipeline", "recognition_workers", 1));
  return rc;
}

int run_parse_one(const ParseArgs& args, const std::string& input_file,
                  const std::string& out_stem, const RunConfig& rc) {
  std::unique_ptr<Backend> backend;
  std::vector<PageInput> inputs;

  if (args.backend == "playback") {
    Warnings warnings;
    std::vector<PageDocument> gt = load_document(input_file, &warnings);
    for (const auto& w : warnings) log_warn(w);
    for (const auto& page : gt) {
      inputs.push_back({page.page_index, page.width_px, page.height_px, page.elements.size()});
    }
    backend = make_playback_backend(std::move(gt), args.strip_order);
  } else {  // mock
    for (size_t i = 0; i < args.mock_pages; ++i) {
      inputs.push_back({static_cast<int64_t>(i), 1000, 1400, args.mock_blocks});
    }
    backend = make_mock_backend({}, args.seed);
  }

  RunResult result = run_pipeline(std::move(inputs), *backend, rc);

  std::vector<PageDocument> parsed_pages;
  for (const auto& pp : result.pages) {
    if (pp.failed) log_warn("page " + std::to_string(pp.page_id) + " failed: " + pp.error);
    else parsed_pages.push_back(pp.page);
  }

  std::vector<MergeDecision> merge_log;
  Warnings warnings;
  const AssembledDocument doc = assemble(parsed_pages, {}, &merge_log, &warnings);
  for (const auto& w : warnings) log_warn(w);

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  atomic_write((out_dir / (out_stem + ".md")).string(), doc.markdown);
  atomic_write((out_dir / (out_stem + ".blocks.json")).string(), assembled_to_json(doc));
  atomic_write((out_dir / (out_stem + ".pages.json")).string(), document_to_json(parsed_pages));
  atomic_write((out_dir / (out_stem + ".stats.json")).string(), run_stats_to_json(result.stats));
  if (!merge_log.empty()) {
    atomic_write((out_dir / (out_stem + ".merges.jsonl")).string(),
                 merge_log_to_jsonl(merge_log));
  }
  return result.stats.failed == 0 ? kExitOk : kExitPartialFailure;
}

int run_parse(const ParseArgs& args) {
  if (args.backend != "playback" && args.backend != "mock") {
    std::cerr << "unknown backend \"" << args.backend << "\"; valid kinds: mock, playback\n";
    return kExitUsage;
  }
  RunConfig rc;
  try {
    rc = run_config_from_file(args.config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (args.backend == "mock") {
    return run_parse_one(args, "", "mock", rc);
  }
  if (args.input.empty() || !fs::exists(args.input)) {
    std::cerr << "input path not found: " << args.input << "\n";
    return kExitUsage;
  }
  int worst = kExitOk;
  if (fs::is_directory(args.input)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(args.input)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      std::cerr << "no .json documents in " << args.input << "\n";
      return kExitUsage;
    }
    for (const auto& f : files) {
      worst = std::max(worst, run_parse_one(args, f.string(), f.stem().string(), rc));
    }
  } else {
    worst = run_parse_one(args, args.input, fs::path(args.input).stem().string(), rc);
  }
  return worst;
}

MetricWeights parse_weights(const std::string& spec) {
  MetricWeights w;
  if (spec.empty()) return w;
  std::istringstream in(spec);
  std::string part;
  std::vector<double> vals;
  while (std::getline(in, part, ',')) vals.push_back(std::stod(part));
  if (vals.size() != 3) throw std::runtime_error("--weights needs w_text,w_formula,w_table");
  w.text = vals[0];
  w.formula = vals[1];
  w.table = vals[2];
  return w;
}

struct EvalArgs {
  std::string gt_path;
  std::string pred_path;
  std::string weights_spec;
  std::string report_kind = "json";
  std::string out_path;
  std::string spotting_gt;
  std::string spotting_pred;
  double iou_threshold = 0.5;
};

int run_eval(const EvalArgs& args) {
  EvalOptions options;
  options.iou_threshold = args.iou_threshold;
  try {
    options.weights = parse_weights(args.weights_spec);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  Warnings warnings;
  std::vector<PageDocument> gt, pred;
  try {
    gt = load_document(args.gt_path, &warnings);
    pred = load_document(args.pred_path, &warnings);
  } catch (const std::exception& e) {
    std::cerr << "load error: " << e.what() << "\n";
    return kExitUsage;
  }
  for (const auto& w : warnings) log_warn(w);

  std::vector<PageMetrics> per_page;
  MetricReport report = evaluate_documents(pred, gt, options, &per_page);

  if (!args.spotting_gt.empty() && !args.spotting_pred.empty()) {
    try {
      const auto gt_records = load_spotting_jsonl(args.spotting_gt);
      const auto pred_records = load_spotting_jsonl(args.spotting_pred);
      std::map<std::string, const SpottingRecord*> pred_by_image;
      for (const auto& r : pred_records) pred_by_image[r.image] = &r;
      double total = 0.0;
      for (const auto& g : gt_records) {
        const auto it = pred_by_image.find(g.image);
        static const std::vector<TextInstance> kNone;
        const auto& p = it == pred_by_image.end() ? kNone : it->second->instances;
        total += spotting_accuracy(p, g.instances, options.iou_threshold);
      }
      report.spotting_accuracy = gt_records.empty() ? 1.0 : total / gt_records.size();
    } catch (const std::exception& e) {
      std::cerr << "spotting load error: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  const std::string output = args.report_kind == "table"
                                 ? report_to_table(report)
                                 : report_to_json(report, per_page);
  if (args.out_path.empty()) std::cout << output;
  else atomic_write(args.out_path, output);
  return kExitOk;
}

struct PlanArgs {
  std::string embeddings_path;
  std::string ids_path;
  std::string rollouts_path;
  std::string out_path;
  size_t k = 4;
  double alpha = 1.0;
  double beta = 2.0;
  size_t budget = 0;
  uint64_t seed = 0;
  bool redistribute = false;
};

int run_plan(const PlanArgs& args) {
  try {
    const std::string ids_path =
        args.ids_path.empty() ? args.embeddings_path + ".ids.json" : args.ids_path;
    const EmbeddingSet embeddings = load_embeddings(args.embeddings_path, ids_path);
    const ClusterAssignment clusters = kmeans(embeddings, args.k, args.seed);

    // Rollouts file: JSON object mapping sample id -> list of outputs.
    std::ifstream in(args.rollouts_path);
    if (!in) throw std::runtime_error("cannot open rollouts file: " + args.rollouts_path);
    nlohmann::json rollouts_json;
    in >> rollouts_json;
    std::map<size_t, std::vector<std::string>> rollouts;
    std::map<std::string, size_t> index_of;
    for (size_t i = 0; i < embeddings.ids.size(); ++i) index_of[embeddings.ids[i]] = i;
    for (auto it = rollouts_json.begin(); it != rollouts_json.end(); ++it) {
      const auto found = index_of.find(it.key());
      if (found == index_of.end()) {
        throw std::runtime_error("rollout id \"" + it.key() + "\" not in embeddings id list");
      }
      rollouts[found->second] = it.value().get<std::vector<std::string>>();
    }

    const UncertaintyScore scores = rollout_uncertainty(rollouts, clusters);
    std::vector<size_t> sizes(clusters.k(), 0);
    for (size_t label : clusters.labels) ++sizes[label];
    const SamplingPlan plan =
        allocate(scores, sizes, args.budget, args.alpha, args.beta, args.redistribute);

    const std::string output = sampling_plan_to_json(plan, scores);
    if (args.out_path.empty()) std::cout << output;
    else atomic_write(args.out_path, output);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "plan error: " << e.what() << "\n";
    return kExitUsage;
  }
}

struct BenchArgs {
  size_t pages = 100;
  std::string latency_spec = "10,20,15";
  size_t batch_capacity = 16;
  double max_wait_ms = 50.0;
  size_t queue_capacity = 64;
  uint64_t seed = 0;
  bool sequential = false;
};

int run_bench(const BenchArgs& args) {
  SimConfig sim;
  sim.pages = args.pages;
  {
    std::istringstream in(args.latency_spec);
    std::string part;
    std::vector<double> vals;
    while (std::getline(in, part, ',')) {
      try {
        vals.push_back(std::stod(part));
      } catch (const std::exception&) {
        std::cerr << "invalid latency spec: " << args.latency_spec << "\n";
        return kExitUsage;
      }
    }
    if (vals.size() != 3 || vals[0] < 0 || vals[1] < 0 || vals[2] < 0) {
      std::cerr << "--stage-latency needs three non-negative values a,b,c\n";
      return kExitUsage;
    }
    sim.latency.prep_ms = vals[0];
    sim.latency.layout_ms = vals[1];
    sim.latency.recognition_per_item_ms = vals[2];
  }
  sim.policy.capacity = args.batch_capacity;
  sim.policy.max_wait_ms = args.max_wait_ms;
  sim.queue_capacity = args.queue_capacity;
  sim.pipelined = !args.sequential;
  const RunStats stats = simulate_pipeline(sim);
  std::cout << run_stats_to_json(stats);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Document-parsing pipeline runtime and evaluation toolkit"};
  app.require_subcommand(1);

  ParseArgs parse_args;
  CLI::App* parse_cmd = app.add_subcommand("parse", "Run the parsing pipeline");
  parse_cmd->add_option("--input", parse_args.input, "Document JSON file or directory");
  parse_cmd->add_option("--backend", parse_args.backend, "Backend kind: mock | playback");
  parse_cmd->add_option("--config", parse_args.config_path, "Pipeline config (.toml or .json)");
  parse_cmd->add_option("--out", parse_args.out_dir, "Output directory");
  parse_cmd->add_option("--pages", parse_args.mock_pages, "Synthetic page count (mock backend)");
  parse_cmd->add_option("--blocks", parse_args.mock_blocks, "Blocks per synthetic page");
  parse_cmd->add_option("--seed", parse_args.seed, "Random seed");
  parse_cmd->add_flag("--strip-order", parse_args.strip_order,
                      "Playback: drop GT order, reconstruct it by voting");

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
  eval_cmd->add_option("--gt", eval_args.gt_path, "Ground-truth document JSON")->required();
  eval_cmd->add_option("--pred", eval_args.pred_path, "Prediction document JSON")->required();
  eval_cmd->add_option("--weights", eval_args.weights_spec, "w_text,w_formula,w_table");
  eval_cmd->add_option("--report", eval_args.report_kind, "json | table")
      ->check(CLI::IsMember({"json", "table"}));
  eval_cmd->add_option("--out", eval_args.out_path, "Report output file (default stdout)");
  eval_cmd->add_option("--iou", eval_args.iou_threshold, "IoU matching threshold");
  eval_cmd->add_option("--spotting-gt", eval_args.spotting_gt, "Spotting GT JSONL");
  eval_cmd->add_option("--spotting-pred", eval_args.spotting_pred, "Spotting prediction JSONL");

  PlanArgs plan_args;
  CLI::App* plan_cmd = app.add_subcommand("plan", "Build an uncertainty-weighted sampling plan");
  plan_cmd->add_option("--embeddings", plan_args.embeddings_path, "Binary embeddings matrix")
      ->required();
  plan_cmd->add_option("--ids", plan_args.ids_path, "Sidecar id list (default <embeddings>.ids.json)");
  plan_cmd->add_option("--rollouts", plan_args.rollouts_path, "Rollouts JSON (id -> outputs)")
      ->required();
  plan_cmd->add_option("--k", plan_args.k, "Cluster count");
  plan_cmd->add_option("--alpha", plan_args.alpha, "Smoothing factor");
  plan_cmd->add_option("--beta", plan_args.beta, "Power factor");
  plan_cmd->add_option("--budget", plan_args.budget, "Total sampling budget")->required();
  plan_cmd->add_option("--seed", plan_args.seed, "Clustering seed");
  plan_cmd->add_flag("--redistribute", plan_args.redistribute, "Redistribute capped surplus");
  plan_cmd->add_option("--out", plan_args.out_path, "Plan output file (default stdout)");

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Simulated-clock throughput benchmark");
  bench_cmd->add_option("--pages", bench_args.pages, "Page count");
  bench_cmd->add_option("--stage-latency", bench_args.latency_spec, "Per-stage ms: a,b,c");
  bench_cmd->add_option("--batch-capacity", bench_args.batch_capacity, "Batch capacity B");
  bench_cmd->add_option("--max-wait-ms", bench_args.max_wait_ms, "Batch wait limit");
  bench_cmd->add_option("--queue-capacity", bench_args.queue_capacity, "Inter-stage queue size");
  bench_cmd->add_option("--seed", bench_args.seed, "Seed (simulation is deterministic)");
  bench_cmd->add_flag("--sequential", bench_args.sequential, "Non-pipelined baseline");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints usage, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (parse_cmd->parsed()) return run_parse(parse_args);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (plan_cmd->parsed()) return run_plan(plan_args);
    if (bench_cmd->parsed()) return run_bench(bench_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartialFailure;
  }
  return kExitUsage;
}
