/*
 * Copyright 2026 The GridGraph Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "gridgraph/benchmark.hpp"
#include "gridgraph/map_io.hpp"

namespace gg = gridgraph;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

gg::BenchConfig config_from_file(const std::string& path) {
  if (path.empty()) return gg::resolve_bench_config(gg::Config{});
  return gg::resolve_bench_config(gg::Config::load(path));
}

gg::OccupancyGrid load_base_map(const std::string& map_arg,
                                double resolution) {
  if (map_arg == "office" || map_arg == "apartment" || map_arg == "symmetric") {
    return gg::builtin_map(map_arg, resolution);
  }
  return gg::load_map_files(map_arg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "gridgraph: building models to occupancy grids, occupancy grids to "
      "pose-graph maps, and 2D-LiDAR localization benchmarks"};
  app.require_subcommand(1);

  // --- slice ---------------------------------------------------------
  auto* slice_cmd =
      app.add_subcommand("slice", "Cut a building model into structural and "
                                  "full occupancy grids");
  std::string slice_model, slice_out = "map";
  double slice_height = 1.0, slice_res = 0.05;
  bool slice_refframe = false;
  slice_cmd->add_option("model", slice_model, "building model JSON")
      ->required();
  slice_cmd->add_option("--height", slice_height, "cut height [m]");
  slice_cmd->add_option("--resolution", slice_res, "cell size [m]");
  slice_cmd->add_option("--out", slice_out, "output prefix");
  slice_cmd->add_flag("--reference-frame", slice_refframe,
                      "add corner posts before slicing");

  // --- classify ------------------------------------------------------
  auto* classify_cmd = app.add_subcommand(
      "classify", "Separate indoor/outdoor/obstacle from a structural and a "
                  "full-entity grid");
  std::string cls_structural, cls_full, cls_out = "classified";
  classify_cmd->add_option("--structural", cls_structural, "structural map yaml")
      ->required();
  classify_cmd->add_option("--full", cls_full, "full-entity map yaml")
      ->required();
  classify_cmd->add_option("--out", cls_out, "output prefix");

  // --- merge ---------------------------------------------------------
  auto* merge_cmd =
      app.add_subcommand("merge", "Merge story grids with Occupied > Free > "
                                  "Unknown precedence");
  std::vector<std::string> merge_inputs;
  std::string merge_out = "merged";
  merge_cmd->add_option("maps", merge_inputs, "map yaml files")->required();
  merge_cmd->add_option("--out", merge_out, "output prefix");

  // --- ogm2pgbm ------------------------------------------------------
  auto* pgbm_cmd = app.add_subcommand(
      "ogm2pgbm", "Convert an occupancy grid into a pose-graph-based map");
  std::string pgbm_map, pgbm_out = "map.pgbm.json", pgbm_cfg;
  std::string pgbm_waypoints;
  pgbm_cmd->add_option("--map", pgbm_map, "map yaml or built-in name")
      ->required();
  pgbm_cmd->add_option("--out", pgbm_out, "output .pgbm.json");
  pgbm_cmd->add_option("--config", pgbm_cfg, "TOML config");
  pgbm_cmd->add_option("--waypoints", pgbm_waypoints,
                       "also write the coverage waypoints CSV");

  // --- simulate ------------------------------------------------------
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Generate a scenario and simulate a LiDAR sequence");
  std::string sim_map = "office", sim_out = "sequence.jsonl", sim_cfg;
  std::string sim_tum, sim_world_out;
  int sim_level = 1;
  bool sim_agents = false;
  std::uint64_t sim_seed = 1;
  sim_cmd->add_option("--map", sim_map, "base map yaml or built-in name");
  sim_cmd->add_option("--level", sim_level, "scenario level 1|2|3")
      ->check(CLI::Range(1, 3));
  sim_cmd->add_flag("--agents", sim_agents, "add dynamic agents");
  sim_cmd->add_option("--seed", sim_seed, "rng seed");
  sim_cmd->add_option("--config", sim_cfg, "TOML config");
  sim_cmd->add_option("--out", sim_out, "sequence JSONL path");
  sim_cmd->add_option("--tum", sim_tum, "also write ground truth in TUM format");
  sim_cmd->add_option("--world-out", sim_world_out,
                      "also write the cluttered world map (prefix)");

  // --- localize ------------------------------------------------------
  auto* loc_cmd = app.add_subcommand("localize",
                                     "Run a localizer against a sequence");
  std::string loc_method = "mcl", loc_map, loc_pgbm, loc_seq, loc_cfg;
  std::string loc_init = "global", loc_out = "estimate.tum", loc_diag;
  std::uint64_t loc_seed = 1;
  loc_cmd->add_option("--method", loc_method, "mcl|gbl|hybrid")
      ->check(CLI::IsMember({"mcl", "gbl", "hybrid"}));
  loc_cmd->add_option("--map", loc_map, "base map yaml or built-in name");
  loc_cmd->add_option("--pgbm", loc_pgbm, "pose-graph map (.pgbm.json)");
  loc_cmd->add_option("--seq", loc_seq, "sequence JSONL")->required();
  loc_cmd->add_option("--seed", loc_seed, "rng seed");
  loc_cmd->add_option("--init", loc_init,
                      "'x,y,theta' or 'global' (SER-seeded)");
  loc_cmd->add_option("--config", loc_cfg, "TOML config");
  loc_cmd->add_option("--out", loc_out, "estimated trajectory (TUM)");
  loc_cmd->add_option("--diag", loc_diag, "per-step diagnostics CSV");

  // --- bench ---------------------------------------------------------
  auto* bench_cmd = app.add_subcommand(
      "bench", "Run the scenario x method benchmark matrix");
  std::string bench_cfg, bench_out = "bench_out";
  int bench_repeats = -1;
  std::uint64_t bench_seed0 = 0;
  bool bench_have_seed0 = false;
  bench_cmd->add_option("--matrix", bench_cfg, "TOML config");
  bench_cmd->add_option("--repeats", bench_repeats,
                        "override bench.repeats from the config");
  bench_cmd
      ->add_option_function<std::uint64_t>(
          "--seed0",
          [&](const std::uint64_t& v) {
            bench_seed0 = v;
            bench_have_seed0 = true;
          },
          "override bench.seed0 from the config");
  bench_cmd->add_option("--out", bench_out, "output directory");

  // --- eval ----------------------------------------------------------
  auto* eval_cmd = app.add_subcommand(
      "eval", "Compare an estimated TUM trajectory against ground truth");
  std::string eval_est, eval_truth;
  eval_cmd->add_option("estimate", eval_est, "estimated trajectory (TUM)")
      ->required();
  eval_cmd->add_option("truth", eval_truth, "ground truth trajectory (TUM)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*slice_cmd) {
      gg::BuildingModel model = gg::load_building_json(slice_model);
      if (slice_refframe) model = gg::add_reference_frame(model);
      const gg::SliceResult sliced = gg::slice(model, slice_height, slice_res);
      if (!sliced.any_hit) {
        std::cerr << "warning: cut plane at " << slice_height
                  << " m missed every element\n";
      }
      gg::save_map_files(sliced.structural, slice_out + "_structural");
      gg::save_map_files(sliced.full, slice_out + "_full");
      std::cout << "wrote " << slice_out << "_structural.{pgm,yaml} and "
                << slice_out << "_full.{pgm,yaml}\n";
    } else if (*classify_cmd) {
      const gg::OccupancyGrid structural = gg::load_map_files(cls_structural);
      const gg::OccupancyGrid full = gg::load_map_files(cls_full);
      gg::save_map_files(gg::classify_regions(structural, full), cls_out);
      std::cout << "wrote " << cls_out << ".{pgm,yaml}\n";
    } else if (*merge_cmd) {
      std::vector<gg::OccupancyGrid> grids;
      grids.reserve(merge_inputs.size());
      for (const auto& path : merge_inputs) {
        grids.push_back(gg::load_map_files(path));
      }
      gg::save_map_files(gg::merge_stories(grids), merge_out);
      std::cout << "wrote " << merge_out << ".{pgm,yaml}\n";
    } else if (*pgbm_cmd) {
      const gg::BenchConfig cfg = config_from_file(pgbm_cfg);
      const gg::OccupancyGrid grid = load_base_map(pgbm_map, cfg.resolution);
      const gg::Ogm2PgbmReport report = gg::ogm2pgbm(grid, cfg.pgbm);
      gg::save_pgbm(report.map, pgbm_out);
      if (!pgbm_waypoints.empty()) {
        write_text(pgbm_waypoints, gg::waypoints_to_csv(report.path));
      }
      std::cout << "wrote " << pgbm_out << ": "
                << report.map.nodes.size() << " nodes, "
                << report.map.submaps.size() << " submaps, "
                << report.map.constraints.size() << " constraints, coverage "
                << report.coverage << "\n";
    } else if (*sim_cmd) {
      const gg::BenchConfig cfg = config_from_file(sim_cfg);
      const gg::OccupancyGrid base = load_base_map(sim_map, cfg.resolution);
      const gg::Scenario scenario = gg::make_scenario(
          base, sim_level, sim_agents, cfg.scenario, sim_seed);
      const gg::Sequence seq = gg::simulate_sequence(
          scenario.world_grid, scenario.trajectory, cfg.scan,
          cfg.sequence_odom_noise, scenario.agents, sim_seed + 50,
          cfg.limits);
      gg::save_sequence(seq, sim_out);
      if (!sim_tum.empty()) gg::save_tum(seq.ground_truth, sim_tum);
      if (!sim_world_out.empty()) {
        gg::save_map_files(scenario.world_grid, sim_world_out);
      }
      std::cout << "wrote " << sim_out << ": " << seq.scans.size()
                << " scans, scenario " << scenario.name << ", clutter "
                << scenario.achieved_clutter_fraction << "\n";
    } else if (*loc_cmd) {
      const gg::BenchConfig cfg = config_from_file(loc_cfg);
      const gg::Sequence seq = gg::load_sequence(loc_seq);
      gg::Trajectory estimate;
      std::string diag;
      if (loc_method == "gbl") {
        if (loc_pgbm.empty()) {
          throw std::runtime_error("localize --method gbl needs --pgbm");
        }
        gg::Pose2 init;
        if (loc_init == "global") {
          throw std::runtime_error(
              "graph tracking needs an initial pose ('--init x,y,theta')");
        }
        double x, y, theta;
        if (std::sscanf(loc_init.c_str(), "%lf,%lf,%lf", &x, &y, &theta) != 3) {
          throw std::runtime_error("--init must be 'x,y,theta' or 'global'");
        }
        const gg::PoseGraphMap map = gg::load_pgbm(loc_pgbm);
        const gg::TrackResult result =
            gg::track(map, seq, gg::Pose2(x, y, theta), cfg.gbl);
        estimate = result.trajectory;
        diag = gg::track_diagnostics_csv(result);
      } else if (loc_method == "mcl") {
        if (loc_map.empty()) {
          throw std::runtime_error("localize --method mcl needs --map");
        }
        const gg::OccupancyGrid base = load_base_map(loc_map, cfg.resolution);
        const gg::LikelihoodField field(base, 0.2, 0.95, 0.05, 2.0,
                                        cfg.scan.range_max);
        if (loc_init == "global") {
          estimate = gg::run_mcl(field, seq, gg::MclInit::GlobalSer,
                                 gg::Pose2(), cfg.mcl, loc_seed, &diag);
        } else {
          double x, y, theta;
          if (std::sscanf(loc_init.c_str(), "%lf,%lf,%lf", &x, &y, &theta) !=
              3) {
            throw std::runtime_error("--init must be 'x,y,theta' or 'global'");
          }
          estimate = gg::run_mcl(field, seq, gg::MclInit::AtPose,
                                 gg::Pose2(x, y, theta), cfg.mcl, loc_seed,
                                 &diag);
        }
      } else {  // hybrid
        if (loc_map.empty() || loc_pgbm.empty()) {
          throw std::runtime_error(
              "localize --method hybrid needs --map and --pgbm");
        }
        const gg::OccupancyGrid base = load_base_map(loc_map, cfg.resolution);
        const gg::PoseGraphMap map = gg::load_pgbm(loc_pgbm);
        const gg::HybridResult result =
            gg::hybrid_localize(base, map, seq, cfg.hybrid, loc_seed);
        estimate = result.trajectory;
        if (result.failed) {
          std::cerr << "warning: the particle filter never met the handover "
                       "gate; output is the filter estimate only\n";
        } else {
          std::cout << "handover at t=" << *result.handover_time << " s\n";
        }
      }
      gg::save_tum(estimate, loc_out);
      if (!loc_diag.empty() && !diag.empty()) write_text(loc_diag, diag);
      std::cout << "wrote " << loc_out << " (" << estimate.size()
                << " poses)\n";
    } else if (*bench_cmd) {
      gg::Config toml =
          bench_cfg.empty() ? gg::Config{} : gg::Config::load(bench_cfg);
      if (bench_repeats > 0) {
        toml.set("bench.repeats", std::to_string(bench_repeats));
      }
      if (bench_have_seed0) {
        toml.set("bench.seed0", std::to_string(bench_seed0));
      }
      const gg::BenchConfig cfg = gg::resolve_bench_config(toml);
      const gg::BenchResult result = gg::run_benchmark(
          cfg, [](const std::string& msg) { std::cout << msg << "\n"; });
      gg::write_benchmark_outputs(result, cfg, bench_out);
      std::cout << "config hash " << result.config_hash << "\nwrote "
                << bench_out << "/results.csv, summary.csv, plots\n";
    } else if (*eval_cmd) {
      const gg::Trajectory est = gg::load_tum(eval_est);
      const gg::Trajectory truth = gg::load_tum(eval_truth);
      const gg::RunMetrics metrics = gg::evaluate(est, truth);
      if (metrics.failed()) {
        std::cout << "converged: no (failure)\n";
      } else {
        std::cout << "converged: yes\nconvergence_time_s: "
                  << *metrics.convergence_time_s
                  << "\ntrans_rmse_cm: " << metrics.trans_rmse_cm
                  << "\nrot_rmse_deg: " << metrics.rot_rmse_deg << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
