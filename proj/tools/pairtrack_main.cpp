/******************************************************************************
 * Copyright 2026 The pairtrack Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pairtrack/detio.hpp"
#include "pairtrack/errors.hpp"
#include "pairtrack/geometry.hpp"
#include "pairtrack/metrics.hpp"
#include "pairtrack/simgen.hpp"
#include "pairtrack/tracker.hpp"
#include "pairtrack/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void write_manifest(const fs::path& path, ordered_json manifest,
                    double wall_seconds) {
  manifest["version"] = pairtrack::kVersion;
  manifest["wall_time_seconds"] = wall_seconds;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pairtrack::IoError(path.string() + ": cannot write manifest");
  out << manifest.dump(2) << "\n";
}

ordered_json config_to_json(const pairtrack::TrackerConfig& cfg) {
  ordered_json j;
  j["window_n"] = cfg.window_n;
  j["iou_threshold"] = cfg.iou_threshold;
  j["min_hits"] = cfg.min_hits;
  j["max_misses"] = cfg.max_misses;
  j["fusion_alpha"] = cfg.fusion_alpha;
  j["score_threshold"] = cfg.score_threshold;
  j["method"] =
      cfg.method == pairtrack::AssociationMethod::Greedy ? "greedy" : "optimal";
  j["fuse_dims"] = cfg.fuse_dims;
  j["emit_coasting"] = cfg.emit_coasting;
  return j;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string spec_path;
  std::string out_dir;
  std::int64_t seed_override = -1;
};

int run_simulate(const SimulateArgs& args) {
  Stopwatch watch;
  std::ifstream in(args.spec_path);
  if (!in) throw pairtrack::SpecError(args.spec_path + ": cannot open spec file");
  std::stringstream buf;
  buf << in.rdbuf();

  nlohmann::json root;
  try {
    root = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw pairtrack::SpecError(args.spec_path + ": " + e.what());
  }

  std::vector<pairtrack::ScenarioSpec> specs;
  if (root.is_object() && root.contains("scenarios")) {
    for (const auto& s : root.at("scenarios")) {
      specs.push_back(pairtrack::parse_scenario(s.dump()));
    }
  } else {
    specs.push_back(pairtrack::parse_scenario(root.dump()));
  }
  for (size_t i = 0; i < specs.size(); ++i) {
    if (args.seed_override >= 0) {
      specs[i].rng_seed = static_cast<std::uint64_t>(args.seed_override) + i;
    }
    for (size_t j = 0; j < i; ++j) {
      if (specs[j].sequence_id == specs[i].sequence_id) {
        throw pairtrack::SpecError("duplicate sequence id '" +
                                   specs[i].sequence_id + "' in spec file");
      }
    }
  }

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir / "gt");

  std::vector<pairtrack::SequenceRecords> all_frames;
  ordered_json seq_meta = ordered_json::array();
  for (const auto& spec : specs) {
    const pairtrack::SimulationOutput sim = pairtrack::generate(spec);
    const fs::path gt_path = out_dir / "gt" / (spec.sequence_id + ".txt");
    pairtrack::write_kitti_labels(sim.ground_truth, gt_path.string());
    all_frames.push_back(sim.frames);
    ordered_json m;
    m["seq"] = spec.sequence_id;
    m["num_frames"] = spec.num_frames;
    m["rng_seed"] = spec.rng_seed;
    seq_meta.push_back(std::move(m));
  }
  const fs::path pairs_path = out_dir / "pairs.jsonl";
  pairtrack::write_pairs(all_frames, pairs_path.string());

  ordered_json manifest;
  manifest["command"] = "simulate";
  manifest["spec_path"] = args.spec_path;
  manifest["out_dir"] = args.out_dir;
  manifest["sequences"] = std::move(seq_meta);
  manifest["outputs"] = {{"pairs", pairs_path.string()},
                         {"gt_dir", (out_dir / "gt").string()}};
  write_manifest(out_dir / "manifest.json", std::move(manifest),
                 watch.seconds());
  std::cerr << "simulate: wrote " << specs.size() << " sequence(s) to "
            << args.out_dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// track
// ---------------------------------------------------------------------------

struct TrackArgs {
  std::string pairs_path;
  std::string out_dir;
  std::string config_path;
  std::string dump_csv_dir;
  pairtrack::TrackerConfig config;
  bool sensor_frame = false;
  int threads = 0;  // 0 = hardware concurrency
};

struct SequenceResult {
  std::string sequence_id;
  std::vector<pairtrack::TrackedBox> rows;
};

SequenceResult track_sequence(const pairtrack::SequenceRecords& seq,
                              const pairtrack::TrackerConfig& config,
                              bool sensor_frame) {
  pairtrack::Tracker tracker(config);
  SequenceResult result;
  result.sequence_id = seq.sequence_id;
  for (const pairtrack::FrameRecord& frame : seq.frames) {
    pairtrack::FrameRecord input = frame;
    if (sensor_frame) {
      for (pairtrack::BoxPair& pair : input.pairs) {
        pair.current = pairtrack::transform_box(frame.ego_pose, pair.current);
        pair.previous = pairtrack::transform_box(frame.ego_pose, pair.previous);
      }
    }
    for (const pairtrack::TrackedBox& row : tracker.step(input)) {
      result.rows.push_back(row);
    }
  }
  return result;
}

int run_track(TrackArgs& args, const std::vector<std::string>& overridden) {
  Stopwatch watch;
  if (!args.config_path.empty()) {
    pairtrack::TrackerConfig file_cfg =
        pairtrack::load_tracker_config(args.config_path);
    // Command-line flags win over config-file values.
    const pairtrack::TrackerConfig flag_cfg = args.config;
    auto overrode = [&](const std::string& name) {
      return std::find(overridden.begin(), overridden.end(), name) !=
             overridden.end();
    };
    if (overrode("--window")) file_cfg.window_n = flag_cfg.window_n;
    if (overrode("--iou-threshold")) file_cfg.iou_threshold = flag_cfg.iou_threshold;
    if (overrode("--min-hits")) file_cfg.min_hits = flag_cfg.min_hits;
    if (overrode("--max-misses")) file_cfg.max_misses = flag_cfg.max_misses;
    if (overrode("--alpha")) file_cfg.fusion_alpha = flag_cfg.fusion_alpha;
    if (overrode("--score-threshold")) file_cfg.score_threshold = flag_cfg.score_threshold;
    if (overrode("--method")) file_cfg.method = flag_cfg.method;
    if (overrode("--no-fuse-dims")) file_cfg.fuse_dims = flag_cfg.fuse_dims;
    if (overrode("--no-coasting-output")) file_cfg.emit_coasting = flag_cfg.emit_coasting;
    args.config = file_cfg;
  }
  args.config.validate();
  std::cerr << "track: config " << args.config.summary() << "\n";

  const std::vector<pairtrack::SequenceRecords> sequences =
      pairtrack::read_pairs(args.pairs_path);
  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  if (!args.dump_csv_dir.empty()) fs::create_directories(args.dump_csv_dir);

  std::vector<SequenceResult> results(sequences.size());
  int threads = args.threads > 0
                    ? args.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads,
                                      static_cast<int>(sequences.size())));
  if (sequences.empty()) threads = 0;

  std::atomic<size_t> cursor{0};
  std::vector<std::thread> pool;
  std::mutex error_mutex;
  std::exception_ptr first_error;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const size_t i = cursor.fetch_add(1);
        if (i >= sequences.size()) return;
        try {
          results[i] = track_sequence(sequences[i], args.config,
                                      args.sensor_frame);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  ordered_json outputs = ordered_json::array();
  for (const SequenceResult& res : results) {
    const fs::path path = out_dir / (res.sequence_id + ".txt");
    pairtrack::write_results(res.rows, path.string());
    outputs.push_back(path.string());
    if (!args.dump_csv_dir.empty()) {
      const fs::path csv =
          fs::path(args.dump_csv_dir) / (res.sequence_id + ".csv");
      std::ofstream cs(csv, std::ios::binary);
      if (!cs) throw pairtrack::IoError(csv.string() + ": cannot write CSV");
      cs << "id,frame,x,y,yaw\n";
      char buf[160];
      for (const pairtrack::TrackedBox& row : res.rows) {
        std::snprintf(buf, sizeof(buf), "%lld,%lld,%.6f,%.6f,%.6f\n",
                      static_cast<long long>(row.track_id),
                      static_cast<long long>(row.frame_index),
                      row.box.center.x, row.box.center.y, row.box.yaw);
        cs << buf;
      }
    }
  }

  ordered_json manifest;
  manifest["command"] = "track";
  manifest["pairs_path"] = args.pairs_path;
  manifest["out_dir"] = args.out_dir;
  manifest["sensor_frame"] = args.sensor_frame;
  manifest["config"] = config_to_json(args.config);
  manifest["outputs"] = std::move(outputs);
  write_manifest(out_dir / "manifest.json", std::move(manifest),
                 watch.seconds());
  std::cerr << "track: wrote results for " << sequences.size()
            << " sequence(s) to " << args.out_dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string gt_path;
  std::string results_path;
  std::string json_path;
  double iou_min = 0.5;
  int recall_points = 40;
};

pairtrack::SequenceSet load_sequence_set(const std::string& path) {
  pairtrack::SequenceSet set;
  const fs::path p(path);
  if (fs::is_directory(p)) {
    for (const auto& entry : fs::directory_iterator(p)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".txt") {
        continue;
      }
      set[entry.path().stem().string()] =
          pairtrack::read_kitti_labels(entry.path().string());
    }
  } else {
    set[p.stem().string()] = pairtrack::read_kitti_labels(p.string());
  }
  return set;
}

int run_evaluate(const EvaluateArgs& args) {
  const pairtrack::SequenceSet gt = load_sequence_set(args.gt_path);
  const pairtrack::SequenceSet hyp = load_sequence_set(args.results_path);
  const pairtrack::MetricsReport report =
      pairtrack::evaluate(gt, hyp, args.iou_min, args.recall_points);
  std::cout << pairtrack::format_report_table(report, args.iou_min);
  if (!args.json_path.empty()) {
    std::ofstream out(args.json_path, std::ios::binary);
    if (!out) {
      throw pairtrack::IoError(args.json_path + ": cannot write report");
    }
    out << pairtrack::report_to_json(report, args.iou_min, args.recall_points);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pairtrack: 3D multi-object tracking from paired box detections"};
  app.set_version_flag("--version", pairtrack::kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Render a synthetic scenario into box pairs and ground truth");
  simulate->add_option("--spec", sim.spec_path, "Scenario spec JSON file")
      ->required();
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();
  simulate->add_option("--seed", sim.seed_override,
                       "Override the spec rng_seed (per-scenario offset)");

  TrackArgs trk;
  CLI::App* track = app.add_subcommand(
      "track", "Associate box pairs into tracks and write KITTI-format results");
  track->add_option("--pairs", trk.pairs_path, "JSONL pair file")->required();
  track->add_option("--out", trk.out_dir, "Output directory")->required();
  track->add_option("--config", trk.config_path,
                    "Tracker config file (key=value or JSON)");
  track->add_option("--window", trk.config.window_n, "Velocity window size N");
  track->add_option("--iou-threshold", trk.config.iou_threshold,
                    "Association IoU threshold");
  track->add_option("--min-hits", trk.config.min_hits,
                    "Hits required to confirm a track");
  track->add_option("--max-misses", trk.config.max_misses,
                    "Consecutive misses before a track dies");
  track->add_option("--alpha", trk.config.fusion_alpha,
                    "Detection weight in prediction/detection fusion");
  track->add_option("--score-threshold", trk.config.score_threshold,
                    "Drop pairs below this score");
  track
      ->add_option_function<std::string>(
          "--method",
          [&trk](const std::string& v) {
            trk.config.method = v == "optimal"
                                    ? pairtrack::AssociationMethod::Optimal
                                    : pairtrack::AssociationMethod::Greedy;
          },
          "Association method")
      ->check(CLI::IsMember({"greedy", "optimal"}));
  track->add_flag_callback(
      "--no-fuse-dims", [&trk]() { trk.config.fuse_dims = false; },
      "Take detection dims instead of blending them");
  track->add_flag_callback(
      "--no-coasting-output", [&trk]() { trk.config.emit_coasting = false; },
      "Suppress coasted predictions in the output");
  track->add_flag("--sensor-frame", trk.sensor_frame,
                  "Pairs are in the sensor frame; apply each frame's ego pose");
  track->add_option("--threads", trk.threads,
                    "Worker threads over sequences (default: hardware)");
  track->add_option("--dump-csv", trk.dump_csv_dir,
                    "Also dump per-sequence trajectory CSV (id,frame,x,y,yaw)");

  EvaluateArgs eva;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score tracking results against ground truth");
  evaluate->add_option("--gt", eva.gt_path, "Ground-truth file or directory")
      ->required();
  evaluate->add_option("--results", eva.results_path,
                       "Results file or directory")
      ->required();
  evaluate->add_option("--iou-min", eva.iou_min, "Match threshold (3D IoU)");
  evaluate->add_option("--l-points", eva.recall_points,
                       "Number of recall points for the sAMOTA family");
  evaluate->add_option("--json", eva.json_path, "Write the report JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (track->parsed()) {
      std::vector<std::string> overridden;
      for (const auto* opt : track->get_options()) {
        if (opt->count() > 0) overridden.push_back(opt->get_name());
      }
      return run_track(trk, overridden);
    }
    if (evaluate->parsed()) return run_evaluate(eva);
  } catch (const pairtrack::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
