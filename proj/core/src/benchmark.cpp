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

#include "gridgraph/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "gridgraph/coverage.hpp"
#include "gridgraph/hash.hpp"
#include "gridgraph/map_io.hpp"
#include "gridgraph/skeleton.hpp"

namespace gridgraph {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

}  // namespace

int thread_cap() {
  const char* env = std::getenv("GRIDGRAPH_THREADS");
  if (env != nullptr) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// Index-claiming worker pool; results land in caller-owned slots, so the
// output is independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const int workers = std::min<std::size_t>(thread_cap(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) break;
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

Ogm2PgbmReport ogm2pgbm(const OccupancyGrid& grid,
                        const Ogm2PgbmParams& params) {
  Ogm2PgbmReport report;
  const CellMask skel = skeletonize(grid);
  if (skel.count() == 0) {
    throw std::runtime_error("ogm2pgbm: map has no Free space");
  }
  const CellMask region = dilate(grid, skel, params.dilation_radius);
  const CellIndex start = default_start_cell(grid, region);
  report.path = wavefront_plan(grid, region, start, params.stride);
  report.coverage = coverage_check(grid, report.path, params.spec);

  // One scan per waypoint with the waypoint heading; the builder needs exact
  // poses, so no odometry noise is injected.
  Trajectory traj;
  traj.reserve(report.path.waypoints.size());
  const double dt = 1.0 / params.spec.rate;
  for (std::size_t i = 0; i < report.path.waypoints.size(); ++i) {
    traj.push_back({i * dt, report.path.waypoints[i]});
  }
  const Sequence seq = simulate_sequence(grid, traj, params.spec, OdomNoise{},
                                         {}, params.seed);
  report.map = build_from_sequence(seq, params.build);
  return report;
}

Sequence slice_sequence(const Sequence& seq, std::size_t from) {
  Sequence out;
  out.static_map_id = seq.static_map_id;
  if (from >= seq.scans.size()) return out;
  out.scans.assign(seq.scans.begin() + from, seq.scans.end());
  out.ground_truth.assign(seq.ground_truth.begin() + from,
                          seq.ground_truth.end());
  out.odometry.assign(seq.odometry.begin() + from, seq.odometry.end());
  return out;
}

Trajectory run_mcl(const LikelihoodField& field, const Sequence& seq,
                   MclInit init, const Pose2& init_pose,
                   const MclRunConfig& cfg, std::uint64_t seed,
                   std::string* diagnostics_csv, const SerField* ser) {
  if (seq.scans.empty()) throw std::runtime_error("run_mcl: empty sequence");
  const OccupancyGrid& grid = field.grid();

  ParticleSet set;
  switch (init) {
    case MclInit::AtPose:
      set = init_tracking(grid, init_pose, cfg.init_sigma,
                          cfg.tracking_particles, seed);
      break;
    case MclInit::GlobalSer:
      set = ser != nullptr
                ? init_global_ser(grid, *ser, seq.scans.front(),
                                  cfg.global_particles, seed)
                : init_global_ser(grid, seq.scans.front(),
                                  cfg.global_particles, seed);
      break;
    case MclInit::GlobalUniform:
      set = init_global_uniform(grid, cfg.global_particles, seed);
      break;
  }

  Trajectory traj;
  traj.reserve(seq.scans.size());
  std::string diag = "stamp,n,n_eff,cov_xx,cov_yy,cov_tt\n";
  for (std::size_t i = 0; i < seq.scans.size(); ++i) {
    const Pose2 delta =
        i == 0 ? Pose2()
               : seq.odometry[i - 1].pose.between(seq.odometry[i].pose);
    const StepResult r = step(set, delta, seq.scans[i], field, cfg.filter);
    traj.push_back({seq.scans[i].stamp, r.estimate.mean});
    if (diagnostics_csv != nullptr) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%.6f,%d,%.2f,%.6f,%.6f,%.6f\n",
                    seq.scans[i].stamp, r.n_particles, r.n_eff,
                    r.estimate.covariance(0, 0), r.estimate.covariance(1, 1),
                    r.estimate.covariance(2, 2));
      diag += buf;
    }
  }
  if (diagnostics_csv != nullptr) *diagnostics_csv = std::move(diag);
  return traj;
}

HybridResult hybrid_localize(const OccupancyGrid& base_grid,
                             const PoseGraphMap& pgbm, const Sequence& seq,
                             const HybridConfig& cfg, std::uint64_t seed) {
  if (seq.scans.empty()) {
    throw std::runtime_error("hybrid_localize: empty sequence");
  }
  // The pose graph must come from the same base map the filter uses; the
  // sequence may legitimately stem from a cluttered world variant.
  if (pgbm.source_grid_hash != hash_hex(base_grid.content_hash())) {
    throw std::runtime_error(
        "hybrid_localize: pose graph was built from a different base map");
  }

  LikelihoodField field(base_grid, 0.2, 0.95, 0.05, 2.0,
                        seq.scans.front().spec.range_max);
  SerField ser;
  if (cfg.use_ser) {
    ser = build_ser_field(base_grid, seq.scans.front().spec.range_max);
  }

  ParticleSet set =
      cfg.use_ser
          ? init_global_ser(base_grid, ser, seq.scans.front(),
                            cfg.mcl.global_particles, seed)
          : init_global_uniform(base_grid, cfg.mcl.global_particles, seed);

  HybridResult result;
  std::size_t handover_index = seq.scans.size();
  for (std::size_t i = 0; i < seq.scans.size(); ++i) {
    const Pose2 delta =
        i == 0 ? Pose2()
               : seq.odometry[i - 1].pose.between(seq.odometry[i].pose);
    const StepResult r = step(set, delta, seq.scans[i], field, cfg.mcl.filter);
    result.trajectory.push_back({seq.scans[i].stamp, r.estimate.mean});
    result.phase.push_back(0);
    if (converged(r.estimate, cfg.handover_covariance)) {
      handover_index = i;
      result.handover_time = seq.scans[i].stamp;
      break;
    }
  }

  if (handover_index >= seq.scans.size()) {
    result.failed = true;  // the filter never met the covariance gate
    return result;
  }

  const Pose2 start_pose = result.trajectory.back().pose;
  const Sequence rest = slice_sequence(seq, handover_index);
  const TrackResult tracked = track(pgbm, rest, start_pose, cfg.gbl);
  // The first tracked sample replaces the handover sample.
  result.trajectory.pop_back();
  result.phase.pop_back();
  for (const TimedPose& tp : tracked.trajectory) {
    result.trajectory.push_back(tp);
    result.phase.push_back(1);
  }
  return result;
}

BenchConfig resolve_bench_config(const Config& cfg) {
  BenchConfig out;
  out.map_name = cfg.get_string("map.name", out.map_name);
  out.map_yaml = cfg.get_string("map.yaml", out.map_yaml);
  out.resolution = cfg.get_double("map.resolution", out.resolution);

  out.scan.fov = cfg.get_double("scan.fov_deg", 270.0) * M_PI / 180.0;
  out.scan.n_beams = cfg.get_int("scan.n_beams", 1081);
  out.scan.range_min = cfg.get_double("scan.range_min", 0.06);
  out.scan.range_max = cfg.get_double("scan.range_max", 10.0);
  out.scan.rate = cfg.get_double("scan.rate", 40.0);
  out.scan.noise_sigma = cfg.get_double("scan.noise_sigma", 0.01);

  out.limits.linear = cfg.get_double("motion.linear", 1.0);
  out.limits.angular =
      cfg.get_double("motion.angular_deg", 1.0) * M_PI / 180.0;

  const auto alphas = cfg.get_double_list(
      "odometry.alphas", {0.01, 0.005, 0.01, 0.005});
  if (alphas.size() != 4) {
    throw std::runtime_error("config: odometry.alphas needs 4 entries");
  }
  out.sequence_odom_noise = {alphas[0], alphas[1], alphas[2], alphas[3]};

  out.pgbm.dilation_radius = cfg.get_int("skeleton.dilation_radius", 3);
  out.pgbm.stride = cfg.get_int("coverage.stride", 5);
  out.pgbm.spec = out.scan;
  out.pgbm.build.nodes_per_submap = cfg.get_int("pgbm.nodes_per_submap", 30);
  out.pgbm.build.hit_prob = cfg.get_double("pgbm.hit_prob", 0.7);
  out.pgbm.build.miss_prob = cfg.get_double("pgbm.miss_prob", 0.4);
  out.pgbm.build.submap_resolution =
      cfg.get_double("pgbm.submap_resolution", 0.05);
  const auto m_info = cfg.get_double_list("pgbm.matcher_info_diag",
                                          {400.0, 400.0, 1000.0});
  const auto o_info =
      cfg.get_double_list("pgbm.odom_info_diag", {50.0, 50.0, 100.0});
  std::copy_n(m_info.begin(), 3, out.pgbm.build.matcher_info_diag.begin());
  std::copy_n(o_info.begin(), 3, out.pgbm.build.odom_info_diag.begin());
  out.pgbm.seed = static_cast<std::uint64_t>(cfg.get_int("pgbm.seed", 1));

  out.scenario.clutter_fraction_reality =
      cfg.get_double("scenario.clutter_reality", 0.15);
  out.scenario.clutter_fraction_disaster =
      cfg.get_double("scenario.clutter_disaster", 0.35);
  out.scenario.blocked_doors = cfg.get_int("scenario.blocked_doors", 2);
  out.scenario.debris_count = cfg.get_int("scenario.debris", 10);
  out.scenario.agents_normal = cfg.get_int("scenario.agents", 5);
  out.scenario.agents_disaster = cfg.get_int("scenario.agents_disaster", 6);
  out.scenario.agent_speed = cfg.get_double("scenario.agent_speed", 1.2);
  out.scenario.agent_speed_factor =
      cfg.get_double("scenario.agent_speed_factor", 1.5);
  out.scenario.agent_radius = cfg.get_double("scenario.agent_radius", 0.25);
  out.scenario.trajectory_stride =
      cfg.get_int("scenario.trajectory_stride", 8);
  out.scenario.trajectory_dilation =
      cfg.get_int("scenario.trajectory_dilation", 0);

  out.mcl.filter.n_min = cfg.get_int("mcl.n_min", 100);
  out.mcl.filter.n_max = cfg.get_int("mcl.n_max", 2000);
  out.mcl.filter.resample_frac = cfg.get_double("mcl.resample_frac", 0.5);
  const auto mcl_alpha = cfg.get_double_list(
      "mcl.alphas", {0.05, 0.05, 0.02, 0.02});
  if (mcl_alpha.size() != 4) {
    throw std::runtime_error("config: mcl.alphas needs 4 entries");
  }
  out.mcl.filter.motion_noise = {mcl_alpha[0], mcl_alpha[1], mcl_alpha[2],
                                 mcl_alpha[3]};
  out.mcl.filter.beam_skip = cfg.get_int("mcl.beam_skip", 10);
  out.mcl.filter.kld_epsilon = cfg.get_double("mcl.kld_epsilon", 0.05);
  out.mcl.filter.kld_delta = cfg.get_double("mcl.kld_delta", 0.01);
  out.mcl.filter.kld_bin_xy = cfg.get_double("mcl.kld_bin_xy", 0.5);
  out.mcl.filter.kld_bin_theta =
      cfg.get_double("mcl.kld_bin_theta_deg", 22.5) * M_PI / 180.0;
  out.mcl.filter.convergence_threshold =
      cfg.get_double("mcl.convergence_threshold", 0.05);
  out.mcl.tracking_particles = cfg.get_int("mcl.particles", 1000);
  out.mcl.global_particles = cfg.get_int("mcl.global_particles", 2000);
  const auto init_sigma =
      cfg.get_double_list("mcl.init_sigma", {0.1, 0.1, 0.05});
  std::copy_n(init_sigma.begin(), 3, out.mcl.init_sigma.begin());

  out.gbl.window.x = cfg.get_double("gbl.window_xy", 0.3);
  out.gbl.window.y = out.gbl.window.x;
  out.gbl.window.theta =
      cfg.get_double("gbl.window_theta_deg", 5.0) * M_PI / 180.0;
  out.gbl.min_score = cfg.get_double("gbl.min_score", 0.55);
  out.gbl.window_size = cfg.get_int("gbl.window_size", 10);
  out.gbl.max_blind = cfg.get_int("gbl.max_blind", 20);
  const auto gbl_o =
      cfg.get_double_list("gbl.odom_info_diag", {50.0, 50.0, 100.0});
  const auto gbl_m =
      cfg.get_double_list("gbl.matcher_info_diag", {400.0, 400.0, 1000.0});
  std::copy_n(gbl_o.begin(), 3, out.gbl.odom_info_diag.begin());
  std::copy_n(gbl_m.begin(), 3, out.gbl.matcher_info_diag.begin());

  out.hybrid.mcl = out.mcl;
  out.hybrid.gbl = out.gbl;
  out.hybrid.handover_covariance = cfg.get_double("hybrid.gate", 0.05);
  out.hybrid.use_ser = cfg.get_bool("hybrid.use_ser", true);

  out.scenarios = cfg.get_string_list("bench.scenarios", out.scenarios);
  out.methods = cfg.get_string_list("bench.methods", out.methods);
  out.repeats = cfg.get_int("bench.repeats", 30);
  out.seed0 = static_cast<std::uint64_t>(cfg.get_int("bench.seed0", 1000));

  Fnv1a h;
  h.update_string(bench_config_to_toml(out).canonical());
  out.config_hash = hash_hex(h.digest());
  return out;
}

Config bench_config_to_toml(const BenchConfig& c) {
  Config out;
  auto setd = [&](const std::string& k, double v) {
    out.set(k, fmt("%.9g", v));
  };
  auto seti = [&](const std::string& k, long long v) {
    out.set(k, std::to_string(v));
  };
  auto sets = [&](const std::string& k, const std::string& v) {
    out.set(k, "\"" + v + "\"");
  };
  auto setlist = [&](const std::string& k, const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += fmt("%.9g", v[i]);
    }
    out.set(k, s + "]");
  };
  sets("map.name", c.map_name);
  sets("map.yaml", c.map_yaml);
  setd("map.resolution", c.resolution);
  setd("scan.fov_deg", c.scan.fov * 180.0 / M_PI);
  seti("scan.n_beams", c.scan.n_beams);
  setd("scan.range_min", c.scan.range_min);
  setd("scan.range_max", c.scan.range_max);
  setd("scan.rate", c.scan.rate);
  setd("scan.noise_sigma", c.scan.noise_sigma);
  setd("motion.linear", c.limits.linear);
  setd("motion.angular_deg", c.limits.angular * 180.0 / M_PI);
  setlist("odometry.alphas",
          {c.sequence_odom_noise.alpha1, c.sequence_odom_noise.alpha2,
           c.sequence_odom_noise.alpha3, c.sequence_odom_noise.alpha4});
  seti("skeleton.dilation_radius", c.pgbm.dilation_radius);
  seti("coverage.stride", c.pgbm.stride);
  seti("pgbm.nodes_per_submap", c.pgbm.build.nodes_per_submap);
  setd("pgbm.hit_prob", c.pgbm.build.hit_prob);
  setd("pgbm.miss_prob", c.pgbm.build.miss_prob);
  setd("pgbm.submap_resolution", c.pgbm.build.submap_resolution);
  setlist("pgbm.matcher_info_diag",
          {c.pgbm.build.matcher_info_diag[0], c.pgbm.build.matcher_info_diag[1],
           c.pgbm.build.matcher_info_diag[2]});
  setlist("pgbm.odom_info_diag",
          {c.pgbm.build.odom_info_diag[0], c.pgbm.build.odom_info_diag[1],
           c.pgbm.build.odom_info_diag[2]});
  seti("pgbm.seed", static_cast<long long>(c.pgbm.seed));
  setd("scenario.clutter_reality", c.scenario.clutter_fraction_reality);
  setd("scenario.clutter_disaster", c.scenario.clutter_fraction_disaster);
  seti("scenario.blocked_doors", c.scenario.blocked_doors);
  seti("scenario.debris", c.scenario.debris_count);
  seti("scenario.agents", c.scenario.agents_normal);
  seti("scenario.agents_disaster", c.scenario.agents_disaster);
  setd("scenario.agent_speed", c.scenario.agent_speed);
  setd("scenario.agent_speed_factor", c.scenario.agent_speed_factor);
  setd("scenario.agent_radius", c.scenario.agent_radius);
  seti("scenario.trajectory_stride", c.scenario.trajectory_stride);
  seti("scenario.trajectory_dilation", c.scenario.trajectory_dilation);
  seti("mcl.n_min", c.mcl.filter.n_min);
  seti("mcl.n_max", c.mcl.filter.n_max);
  setd("mcl.resample_frac", c.mcl.filter.resample_frac);
  setlist("mcl.alphas",
          {c.mcl.filter.motion_noise.alpha1, c.mcl.filter.motion_noise.alpha2,
           c.mcl.filter.motion_noise.alpha3, c.mcl.filter.motion_noise.alpha4});
  seti("mcl.beam_skip", c.mcl.filter.beam_skip);
  setd("mcl.kld_epsilon", c.mcl.filter.kld_epsilon);
  setd("mcl.kld_delta", c.mcl.filter.kld_delta);
  setd("mcl.kld_bin_xy", c.mcl.filter.kld_bin_xy);
  setd("mcl.kld_bin_theta_deg", c.mcl.filter.kld_bin_theta * 180.0 / M_PI);
  setd("mcl.convergence_threshold", c.mcl.filter.convergence_threshold);
  seti("mcl.particles", c.mcl.tracking_particles);
  seti("mcl.global_particles", c.mcl.global_particles);
  setlist("mcl.init_sigma",
          {c.mcl.init_sigma[0], c.mcl.init_sigma[1], c.mcl.init_sigma[2]});
  setd("gbl.window_xy", c.gbl.window.x);
  setd("gbl.window_theta_deg", c.gbl.window.theta * 180.0 / M_PI);
  setd("gbl.min_score", c.gbl.min_score);
  seti("gbl.window_size", c.gbl.window_size);
  seti("gbl.max_blind", c.gbl.max_blind);
  setlist("gbl.odom_info_diag",
          {c.gbl.odom_info_diag[0], c.gbl.odom_info_diag[1],
           c.gbl.odom_info_diag[2]});
  setlist("gbl.matcher_info_diag",
          {c.gbl.matcher_info_diag[0], c.gbl.matcher_info_diag[1],
           c.gbl.matcher_info_diag[2]});
  setd("hybrid.gate", c.hybrid.handover_covariance);
  out.set("hybrid.use_ser", c.hybrid.use_ser ? "true" : "false");
  {
    std::string s = "[";
    for (std::size_t i = 0; i < c.scenarios.size(); ++i) {
      if (i) s += ", ";
      s += "\"" + c.scenarios[i] + "\"";
    }
    out.set("bench.scenarios", s + "]");
  }
  {
    std::string s = "[";
    for (std::size_t i = 0; i < c.methods.size(); ++i) {
      if (i) s += ", ";
      s += "\"" + c.methods[i] + "\"";
    }
    out.set("bench.methods", s + "]");
  }
  seti("bench.repeats", c.repeats);
  seti("bench.seed0", static_cast<long long>(c.seed0));
  return out;
}

namespace {

struct ScenarioArtifacts {
  Scenario scenario;
  Sequence sequence;
};

bool method_is_stochastic(const std::string& method) {
  return method != "gbl";
}

struct RunTask {
  std::string scenario;
  std::string method;
  std::uint64_t seed;
  const ScenarioArtifacts* artifacts;
};

}  // namespace

BenchResult run_benchmark(
    const BenchConfig& cfg,
    const std::function<void(const std::string&)>& progress) {
  auto report = [&](const std::string& msg) {
    if (progress) progress(msg);
  };

  const OccupancyGrid base = cfg.map_yaml.empty()
                                 ? builtin_map(cfg.map_name, cfg.resolution)
                                 : load_map_files(cfg.map_yaml);
  report("base map ready (" + std::to_string(base.width()) + "x" +
         std::to_string(base.height()) + ")");

  const Ogm2PgbmReport pgbm_report = ogm2pgbm(base, cfg.pgbm);
  report("pose graph built: " + std::to_string(pgbm_report.map.submaps.size()) +
         " submaps, coverage " + fmt("%.3f", pgbm_report.coverage));

  const LikelihoodField field(base, 0.2, 0.95, 0.05, 2.0, cfg.scan.range_max);
  const SerField ser = build_ser_field(base, cfg.scan.range_max);

  // Scenario levels present in the matrix.
  std::map<std::string, ScenarioArtifacts> artifacts;
  for (const std::string& name : cfg.scenarios) {
    if (name.size() != 3 || name[1] != '-' || name[0] < '1' || name[0] > '3' ||
        (name[2] != '1' && name[2] != '2')) {
      throw std::runtime_error("bench: scenario id must be like '2-1', got '" +
                               name + "'");
    }
    const int level = name[0] - '0';
    const bool agents = name[2] == '2';
    ScenarioArtifacts art;
    art.scenario = make_scenario(base, level, agents, cfg.scenario,
                                 cfg.seed0 + static_cast<std::uint64_t>(level));
    art.sequence = simulate_sequence(
        art.scenario.world_grid, art.scenario.trajectory, cfg.scan,
        cfg.sequence_odom_noise, art.scenario.agents,
        cfg.seed0 + 50 + static_cast<std::uint64_t>(level), cfg.limits);
    report("scenario " + name + " ready: " +
           std::to_string(art.sequence.scans.size()) + " scans, clutter " +
           fmt("%.3f", art.scenario.achieved_clutter_fraction));
    artifacts.emplace(name, std::move(art));
  }

  std::vector<RunTask> tasks;
  for (const std::string& scenario : cfg.scenarios) {
    for (const std::string& method : cfg.methods) {
      const int reps = method_is_stochastic(method) ? cfg.repeats : 1;
      for (int r = 0; r < reps; ++r) {
        tasks.push_back({scenario, method,
                         cfg.seed0 + static_cast<std::uint64_t>(r),
                         &artifacts.at(scenario)});
      }
    }
  }

  BenchResult result;
  result.config_hash = cfg.config_hash;
  result.rows.resize(tasks.size());

  parallel_for(tasks.size(), [&](std::size_t i) {
    const RunTask& task = tasks[i];
    const Sequence& seq = task.artifacts->sequence;
    const Pose2 truth0 = seq.ground_truth.front().pose;

    BenchRow row;
    row.scenario = task.scenario;
    row.method = task.method;
    row.seed = task.seed;
    Trajectory estimate;
    bool hard_failure = false;
    if (task.method == "mcl") {
      estimate = run_mcl(field, seq, MclInit::AtPose, truth0, cfg.mcl,
                         task.seed);
    } else if (task.method == "mcl_ser") {
      estimate =
          run_mcl(field, seq, MclInit::GlobalSer, Pose2(), cfg.mcl, task.seed,
                  nullptr, &ser);
    } else if (task.method == "mcl_uniform") {
      estimate = run_mcl(field, seq, MclInit::GlobalUniform, Pose2(), cfg.mcl,
                         task.seed);
    } else if (task.method == "gbl") {
      estimate = track(pgbm_report.map, seq, truth0, cfg.gbl).trajectory;
    } else if (task.method == "hybrid") {
      const HybridResult h =
          hybrid_localize(base, pgbm_report.map, seq, cfg.hybrid, task.seed);
      estimate = h.trajectory;
      hard_failure = h.failed;
    } else {
      throw std::runtime_error("bench: unknown method '" + task.method + "'");
    }

    row.metrics = evaluate(estimate, seq.ground_truth);
    if (hard_failure) row.metrics.convergence_time_s.reset();
    row.metrics.method = task.method;
    row.metrics.scenario = task.scenario;
    row.metrics.run_seed = task.seed;
    result.rows[i] = std::move(row);
  });

  // Long-format CSV ordered by (scenario, method, seed): the task list is
  // already in that order and rows land by index, so bytes are thread-count
  // independent.
  std::string csv = "scenario,method,seed,trans_rmse_cm,rot_rmse_deg,conv_time_s,failed\n";
  for (const BenchRow& row : result.rows) {
    csv += row.scenario + "," + row.method + "," + std::to_string(row.seed) + ",";
    if (row.metrics.failed()) {
      csv += ",,,1\n";
    } else {
      csv += fmt("%.4f", row.metrics.trans_rmse_cm) + "," +
             fmt("%.4f", row.metrics.rot_rmse_deg) + "," +
             fmt("%.4f", *row.metrics.convergence_time_s) + ",0\n";
    }
  }
  result.results_csv = std::move(csv);

  // Per-cell summary: mean/median/IQR over successful runs plus failure
  // counts.
  std::map<std::pair<std::string, std::string>, std::vector<const BenchRow*>>
      cells;
  for (const BenchRow& row : result.rows) {
    cells[{row.scenario, row.method}].push_back(&row);
  }
  std::string summary =
      "scenario,method,n_runs,n_failed,mean_trans_rmse_cm,"
      "median_trans_rmse_cm,iqr_trans_rmse_cm,mean_rot_rmse_deg,"
      "median_conv_time_s\n";
  auto quantile = [](std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
  };
  for (const auto& [key, rows] : cells) {
    std::vector<double> trans, rot, conv;
    int failed = 0;
    for (const BenchRow* row : rows) {
      if (row->metrics.failed()) {
        ++failed;
        continue;
      }
      trans.push_back(row->metrics.trans_rmse_cm);
      rot.push_back(row->metrics.rot_rmse_deg);
      conv.push_back(*row->metrics.convergence_time_s);
    }
    double mean_trans = 0.0, mean_rot = 0.0;
    for (const double v : trans) mean_trans += v;
    for (const double v : rot) mean_rot += v;
    if (!trans.empty()) {
      mean_trans /= trans.size();
      mean_rot /= rot.size();
    }
    summary += key.first + "," + key.second + "," +
               std::to_string(rows.size()) + "," + std::to_string(failed) +
               "," + fmt("%.4f", mean_trans) + "," +
               fmt("%.4f", quantile(trans, 0.5)) + "," +
               fmt("%.4f", quantile(trans, 0.75) - quantile(trans, 0.25)) +
               "," + fmt("%.4f", mean_rot) + "," +
               fmt("%.4f", quantile(conv, 0.5)) + "\n";
  }
  result.summary_csv = std::move(summary);
  return result;
}

void write_benchmark_outputs(const BenchResult& result,
                             const BenchConfig& cfg,
                             const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
  };
  write(dir / "results.csv", result.results_csv);
  write(dir / "summary.csv", result.summary_csv);
  write(dir / "config_resolved.toml", bench_config_to_toml(cfg).canonical());
  write(dir / "run_meta.json",
        "{\"config_hash\": \"" + result.config_hash + "\"}\n");
  write(dir / "boxplot_trans.svg", render_rmse_boxplot_svg(result.rows));
  write(dir / "convergence_time.svg", render_convergence_svg(result.rows));
}

namespace {

struct BoxStats {
  double lo, q1, med, q3, hi;
};

BoxStats box_stats(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  auto q = [&](double f) {
    const double pos = f * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
  };
  return {v.front(), q(0.25), q(0.5), q(0.75), v.back()};
}

}  // namespace

std::string render_rmse_boxplot_svg(const std::vector<BenchRow>& rows) {
  // Group per (scenario, method); skip failed runs.
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const BenchRow& row : rows) {
    if (row.metrics.failed()) continue;
    groups[{row.scenario, row.method}].push_back(row.metrics.trans_rmse_cm);
  }
  const int box_w = 46;
  const int width = std::max<int>(160, 70 + box_w * static_cast<int>(groups.size()));
  const int height = 320;
  const int plot_top = 20, plot_bottom = 260;
  double vmax = 1.0;
  for (const auto& [key, vals] : groups) {
    for (const double v : vals) vmax = std::max(vmax, v);
  }
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n";
  svg << "<text x='8' y='14' font-size='12'>translational RMSE [cm]</text>\n";
  auto ypix = [&](double v) {
    return plot_bottom - (v / vmax) * (plot_bottom - plot_top);
  };
  svg << "<line x1='50' y1='" << plot_top << "' x2='50' y2='" << plot_bottom
      << "' stroke='black'/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = vmax * tick / 4.0;
    svg << "<line x1='46' y1='" << ypix(v) << "' x2='50' y2='" << ypix(v)
        << "' stroke='black'/>\n<text x='4' y='" << ypix(v) + 4
        << "' font-size='10'>" << fmt("%.1f", v) << "</text>\n";
  }
  int slot = 0;
  for (const auto& [key, vals] : groups) {
    const BoxStats s = box_stats(vals);
    const int cx = 70 + slot * box_w + box_w / 2;
    const int x0 = cx - 14, x1 = cx + 14;
    svg << "<line x1='" << cx << "' y1='" << ypix(s.lo) << "' x2='" << cx
        << "' y2='" << ypix(s.hi) << "' stroke='black'/>\n";
    svg << "<rect x='" << x0 << "' y='" << ypix(s.q3) << "' width='"
        << (x1 - x0) << "' height='" << (ypix(s.q1) - ypix(s.q3))
        << "' fill='#9ecae1' stroke='black'/>\n";
    svg << "<line x1='" << x0 << "' y1='" << ypix(s.med) << "' x2='" << x1
        << "' y2='" << ypix(s.med) << "' stroke='black' stroke-width='2'/>\n";
    svg << "<text x='" << cx << "' y='" << plot_bottom + 14
        << "' font-size='9' text-anchor='middle'>" << key.first << "</text>\n";
    svg << "<text x='" << cx << "' y='" << plot_bottom + 26
        << "' font-size='9' text-anchor='middle'>" << key.second
        << "</text>\n";
    ++slot;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_convergence_svg(const std::vector<BenchRow>& rows) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  std::map<std::pair<std::string, std::string>, int> failures;
  for (const BenchRow& row : rows) {
    if (row.metrics.failed()) {
      failures[{row.scenario, row.method}]++;
      continue;
    }
    groups[{row.scenario, row.method}].push_back(
        *row.metrics.convergence_time_s);
    failures.try_emplace({row.scenario, row.method}, 0);
  }
  const int bar_w = 46;
  const int width =
      std::max<int>(160, 70 + bar_w * static_cast<int>(failures.size()));
  const int height = 320;
  const int plot_top = 20, plot_bottom = 260;
  double vmax = 1.0;
  for (const auto& [key, vals] : groups) {
    for (const double v : vals) vmax = std::max(vmax, v);
  }
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n";
  svg << "<text x='8' y='14' font-size='12'>median convergence time "
         "[s]</text>\n";
  auto ypix = [&](double v) {
    return plot_bottom - (v / vmax) * (plot_bottom - plot_top);
  };
  int slot = 0;
  for (const auto& [key, nfail] : failures) {
    const int cx = 70 + slot * bar_w + bar_w / 2;
    const auto it = groups.find(key);
    if (it != groups.end() && !it->second.empty()) {
      const double med = box_stats(it->second).med;
      svg << "<rect x='" << cx - 14 << "' y='" << ypix(med)
          << "' width='28' height='" << (plot_bottom - ypix(med))
          << "' fill='#a1d99b' stroke='black'/>\n";
      svg << "<text x='" << cx << "' y='" << ypix(med) - 4
          << "' font-size='9' text-anchor='middle'>" << fmt("%.1f", med)
          << "</text>\n";
    } else {
      svg << "<text x='" << cx << "' y='" << plot_bottom - 8
          << "' font-size='10' text-anchor='middle'>fail</text>\n";
    }
    svg << "<text x='" << cx << "' y='" << plot_bottom + 14
        << "' font-size='9' text-anchor='middle'>" << key.first << "</text>\n";
    svg << "<text x='" << cx << "' y='" << plot_bottom + 26
        << "' font-size='9' text-anchor='middle'>" << key.second
        << "</text>\n";
    ++slot;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace gridgraph
