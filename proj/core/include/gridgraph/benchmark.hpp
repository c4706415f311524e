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

#ifndef GRIDGRAPH_BENCHMARK_HPP
#define GRIDGRAPH_BENCHMARK_HPP

#include <functional>
#include <optional>

#include "gridgraph/config.hpp"
#include "gridgraph/evaluate.hpp"
#include "gridgraph/gbl.hpp"
#include "gridgraph/mcl.hpp"
#include "gridgraph/scenario.hpp"

namespace gridgraph {

// OGM -> pose-graph-based map: skeleton, dilation, wavefront coverage, scan
// simulation at the waypoints, trajectory building.
struct Ogm2PgbmParams {
  int dilation_radius = 3;
  int stride = 5;
  ScanSpec spec;
  BuildParams build;
  std::uint64_t seed = 1;
};

struct Ogm2PgbmReport {
  PoseGraphMap map;
  WaypointPath path;
  double coverage = 0.0;
};

Ogm2PgbmReport ogm2pgbm(const OccupancyGrid& grid,
                        const Ogm2PgbmParams& params);

enum class MclInit { AtPose, GlobalSer, GlobalUniform };

struct MclRunConfig {
  MclConfig filter;
  int tracking_particles = 1000;
  int global_particles = 2000;
  std::array<double, 3> init_sigma = {0.1, 0.1, 0.05};
};

// Replays the sequence through the particle filter; the estimate stream is
// stamped like the scans. Optional CSV receives per-step N, N_eff and the
// covariance diagonal.
Trajectory run_mcl(const LikelihoodField& field, const Sequence& seq,
                   MclInit init, const Pose2& init_pose,
                   const MclRunConfig& cfg, std::uint64_t seed,
                   std::string* diagnostics_csv = nullptr,
                   const SerField* ser = nullptr);

struct HybridConfig {
  MclRunConfig mcl;
  GblConfig gbl;
  double handover_covariance = 0.05;  // m^2
  bool use_ser = true;
};

struct HybridResult {
  Trajectory trajectory;
  std::vector<int> phase;  // 0 = particle filter, 1 = graph tracking
  std::optional<double> handover_time;
  bool failed = false;  // particle filter never converged
};

// SER-seeded global localization, then graph-based tracking from the
// converged estimate onward.
HybridResult hybrid_localize(const OccupancyGrid& base_grid,
                             const PoseGraphMap& pgbm, const Sequence& seq,
                             const HybridConfig& cfg, std::uint64_t seed);

// Sub-sequence starting at scan index `from` (shared map id and spec).
Sequence slice_sequence(const Sequence& seq, std::size_t from);

struct BenchConfig {
  std::string map_name = "office";   // built-in name
  std::string map_yaml;              // overrides map_name when set
  double resolution = 0.05;
  ScanSpec scan;
  MotionLimits limits;
  OdomNoise sequence_odom_noise{0.01, 0.005, 0.01, 0.005};
  Ogm2PgbmParams pgbm;
  ScenarioParams scenario;
  MclRunConfig mcl;
  GblConfig gbl;
  HybridConfig hybrid;
  std::vector<std::string> scenarios = {"1-1", "2-1", "3-1"};
  std::vector<std::string> methods = {"mcl", "gbl", "hybrid"};
  int repeats = 30;
  std::uint64_t seed0 = 1000;
  std::string config_hash;  // canonical resolved-config FNV stamp
};

// Applies every TOML key onto the defaults and stamps the resolved hash.
BenchConfig resolve_bench_config(const Config& cfg);
Config bench_config_to_toml(const BenchConfig& cfg);

struct BenchRow {
  std::string scenario;
  std::string method;
  std::uint64_t seed = 0;
  RunMetrics metrics;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::string results_csv;
  std::string summary_csv;
  std::string config_hash;
};

// Runs the scenario x method matrix. Stochastic methods repeat with seeds
// seed0+i, the deterministic graph tracker runs once. Parallel across runs
// (capped by GRIDGRAPH_THREADS) with byte-identical output regardless of
// thread count.
BenchResult run_benchmark(const BenchConfig& cfg,
                          const std::function<void(const std::string&)>&
                              progress = nullptr);

void write_benchmark_outputs(const BenchResult& result,
                             const BenchConfig& cfg,
                             const std::string& out_dir);

// Box-plot SVG of per-run translational RMSE grouped by scenario and method.
std::string render_rmse_boxplot_svg(const std::vector<BenchRow>& rows);
// Median convergence time per scenario and method as a grouped bar chart.
std::string render_convergence_svg(const std::vector<BenchRow>& rows);

int thread_cap();

}  // namespace gridgraph

#endif  // GRIDGRAPH_BENCHMARK_HPP
