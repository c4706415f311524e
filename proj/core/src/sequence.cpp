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

#include "gridgraph/sequence.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "gridgraph/hash.hpp"

namespace gridgraph {

namespace {

// Paints agents as Occupied disks, remembering what it overwrote so the
// scratch grid can be restored between scans.
class AgentPainter {
 public:
  explicit AgentPainter(OccupancyGrid& grid) : grid_(grid) {}

  void paint(const std::vector<Agent>& agents, double t) {
    for (const Agent& a : agents) {
      const Point2 c = a.position_at(t);
      const int r_cells = static_cast<int>(
          std::ceil(a.radius / grid_.resolution()));
      const CellIndex center = grid_.world_to_cell(c);
      for (int dy = -r_cells; dy <= r_cells; ++dy) {
        for (int dx = -r_cells; dx <= r_cells; ++dx) {
          const CellIndex cell{center.x + dx, center.y + dy};
          if (!grid_.in_bounds(cell)) continue;
          const Point2 p = grid_.cell_to_world(cell);
          if (distance(p, c) > a.radius) continue;
          if (grid_.at(cell) == CellState::Occupied) continue;
          undo_.push_back({cell, grid_.at(cell)});
          grid_.set(cell, CellState::Occupied);
        }
      }
    }
  }

  void restore() {
    for (auto it = undo_.rbegin(); it != undo_.rend(); ++it) {
      grid_.set(it->first, it->second);
    }
    undo_.clear();
  }

 private:
  OccupancyGrid& grid_;
  std::vector<std::pair<CellIndex, CellState>> undo_;
};

void validate_agents(const OccupancyGrid& grid,
                     const std::vector<Agent>& agents) {
  for (const Agent& a : agents) {
    if (a.speed <= 0.0) throw std::runtime_error("agent: speed must be > 0");
    if (a.radius <= 0.0) throw std::runtime_error("agent: radius must be > 0");
    if (a.path.empty()) throw std::runtime_error("agent: empty path");
    for (const Point2& p : a.path) {
      if (!grid.in_bounds(grid.world_to_cell(p))) {
        throw std::runtime_error("agent: path exits grid bounds");
      }
    }
  }
}

nlohmann::json spec_to_json(const ScanSpec& spec) {
  return {{"fov", spec.fov},           {"n_beams", spec.n_beams},
          {"range_min", spec.range_min}, {"range_max", spec.range_max},
          {"rate", spec.rate},         {"noise_sigma", spec.noise_sigma}};
}

ScanSpec spec_from_json(const nlohmann::json& j) {
  ScanSpec spec;
  spec.fov = j.at("fov").get<double>();
  spec.n_beams = j.at("n_beams").get<int>();
  spec.range_min = j.at("range_min").get<double>();
  spec.range_max = j.at("range_max").get<double>();
  spec.rate = j.at("rate").get<double>();
  spec.noise_sigma = j.at("noise_sigma").get<double>();
  spec.validate();
  return spec;
}

}  // namespace

Point2 Agent::position_at(double t) const {
  if (path.size() == 1) return path.front();
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    total += distance(path[i - 1], path[i]);
  }
  if (total <= 0.0) return path.front();
  double s = speed * std::max(0.0, t);
  if (loop) {
    s = std::fmod(s, total);
  } else {
    s = std::min(s, total);
  }
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double seg = distance(path[i - 1], path[i]);
    if (s <= seg && seg > 0.0) {
      const double f = s / seg;
      return {path[i - 1].x + f * (path[i].x - path[i - 1].x),
              path[i - 1].y + f * (path[i].y - path[i - 1].y)};
    }
    s -= seg;
  }
  return path.back();
}

Trajectory sample_path_trajectory(const WaypointPath& path,
                                  const MotionLimits& limits, double rate) {
  if (path.waypoints.empty()) {
    throw std::runtime_error("sample_path_trajectory: empty path");
  }
  if (rate <= 0.0 || limits.linear <= 0.0 || limits.angular <= 0.0) {
    throw std::runtime_error("sample_path_trajectory: bad limits");
  }
  const double dt = 1.0 / rate;
  Trajectory traj;
  Pose2 pose = path.waypoints.front();
  traj.push_back({0.0, pose});
  std::size_t target = 1;
  double t = 0.0;
  const double arrive_eps = limits.linear * dt * 0.5;
  // Hard cap keeps a malformed path from looping forever.
  const std::size_t max_samples =
      1000 + static_cast<std::size_t>(path.waypoints.size()) * 4000;
  while (target < path.waypoints.size() && traj.size() < max_samples) {
    t += dt;
    const Pose2& goal = path.waypoints[target];
    const double dx = goal.x - pose.x;
    const double dy = goal.y - pose.y;
    const double dist = std::hypot(dx, dy);
    // Holonomic base: translate toward the target while slewing the heading
    // to the travel direction.
    const double step = limits.linear * dt;
    if (dist > 1e-9) {
      const double f = std::min(1.0, step / dist);
      pose.x += f * dx;
      pose.y += f * dy;
      const double want = std::atan2(dy, dx);
      const double err = normalize_angle(want - pose.theta);
      const double max_turn = limits.angular * dt;
      pose.theta = normalize_angle(
          pose.theta + std::clamp(err, -max_turn, max_turn));
    }
    traj.push_back({t, pose});
    if (std::hypot(goal.x - pose.x, goal.y - pose.y) <= arrive_eps) {
      ++target;
    }
  }
  return traj;
}

Pose2 sample_odometry_delta(const Pose2& true_delta, const OdomNoise& noise,
                            Rng& rng) {
  const double trans = std::hypot(true_delta.x, true_delta.y);
  double rot1 = 0.0;
  if (trans > 1e-9) rot1 = std::atan2(true_delta.y, true_delta.x);
  const double rot2 = normalize_angle(true_delta.theta - rot1);

  const double rot1_hat =
      rot1 + rng.normal(std::sqrt(noise.alpha1 * rot1 * rot1 +
                                  noise.alpha2 * trans * trans));
  const double trans_hat =
      trans + rng.normal(std::sqrt(noise.alpha3 * trans * trans +
                                   noise.alpha4 * (rot1 * rot1 + rot2 * rot2)));
  const double rot2_hat =
      rot2 + rng.normal(std::sqrt(noise.alpha1 * rot2 * rot2 +
                                  noise.alpha2 * trans * trans));

  return Pose2(trans_hat * std::cos(rot1_hat), trans_hat * std::sin(rot1_hat),
               rot1_hat + rot2_hat);
}

Sequence simulate_sequence(const OccupancyGrid& grid,
                           const Trajectory& trajectory, const ScanSpec& spec,
                           const OdomNoise& odom_noise,
                           const std::vector<Agent>& agents,
                           std::uint64_t rng_seed,
                           const Pose2& initial_odom_offset) {
  if (trajectory.empty()) {
    throw std::runtime_error("simulate_sequence: empty trajectory");
  }
  spec.validate();
  validate_agents(grid, agents);

  Sequence seq;
  seq.static_map_id = grid.content_hash();
  seq.ground_truth = trajectory;
  Rng rng(rng_seed);

  OccupancyGrid scratch = grid;  // agents never touch the caller's grid
  AgentPainter painter(scratch);

  Pose2 odom = trajectory.front().pose.compose(initial_odom_offset);
  seq.odometry.push_back({trajectory.front().stamp, odom});
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const Pose2 delta =
        trajectory[i - 1].pose.between(trajectory[i].pose);
    odom = odom.compose(sample_odometry_delta(delta, odom_noise, rng));
    seq.odometry.push_back({trajectory[i].stamp, odom});
  }

  seq.scans.reserve(trajectory.size());
  for (const TimedPose& tp : trajectory) {
    if (!agents.empty()) painter.paint(agents, tp.stamp);
    Scan scan = simulate_scan(scratch, tp.pose, spec, rng);
    scan.stamp = tp.stamp;
    seq.scans.push_back(std::move(scan));
    if (!agents.empty()) painter.restore();
  }
  return seq;
}

Sequence simulate_sequence(const OccupancyGrid& grid, const WaypointPath& path,
                           const ScanSpec& spec, const OdomNoise& odom_noise,
                           const std::vector<Agent>& agents,
                           std::uint64_t rng_seed, const MotionLimits& limits,
                           const Pose2& initial_odom_offset) {
  const Trajectory traj = sample_path_trajectory(path, limits, spec.rate);
  return simulate_sequence(grid, traj, spec, odom_noise, agents, rng_seed,
                           initial_odom_offset);
}

std::string sequence_to_jsonl(const Sequence& seq) {
  std::ostringstream out;
  nlohmann::json meta = {
      {"type", "meta"},
      {"version", 1},
      {"map_hash", hash_hex(seq.static_map_id)},
      {"spec", seq.scans.empty() ? nlohmann::json(nullptr)
                                 : spec_to_json(seq.scans.front().spec)},
      {"n_samples", seq.ground_truth.size()},
  };
  out << meta.dump() << "\n";

  auto pose_record = [](const char* type, const TimedPose& tp) {
    return nlohmann::json{
        {"t", tp.stamp}, {"type", type}, {"pose", {tp.pose.x, tp.pose.y, tp.pose.theta}}};
  };
  for (std::size_t i = 0; i < seq.ground_truth.size(); ++i) {
    out << pose_record("truth", seq.ground_truth[i]).dump() << "\n";
    if (i < seq.odometry.size()) {
      out << pose_record("odom", seq.odometry[i]).dump() << "\n";
    }
    if (i < seq.scans.size()) {
      nlohmann::json rec = {{"t", seq.scans[i].stamp}, {"type", "scan"}};
      nlohmann::json ranges = nlohmann::json::array();
      for (const double r : seq.scans[i].ranges) {
        if (is_return(r)) {
          ranges.push_back(r);
        } else {
          ranges.push_back(nullptr);
        }
      }
      rec["ranges"] = std::move(ranges);
      out << rec.dump() << "\n";
    }
  }
  return out.str();
}

Sequence sequence_from_jsonl(const std::string& text) {
  Sequence seq;
  std::istringstream in(text);
  std::string line;
  ScanSpec spec;
  bool have_meta = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("sequence jsonl: " + std::string(e.what()));
    }
    const std::string type = rec.at("type").get<std::string>();
    if (type == "meta") {
      if (rec.at("version").get<int>() != 1) {
        throw std::runtime_error("sequence jsonl: unsupported version");
      }
      if (!rec.at("spec").is_null()) spec = spec_from_json(rec.at("spec"));
      seq.static_map_id = std::stoull(
          rec.at("map_hash").get<std::string>(), nullptr, 16);
      have_meta = true;
      continue;
    }
    const double t = rec.at("t").get<double>();
    if (type == "truth" || type == "odom") {
      const auto& p = rec.at("pose");
      const TimedPose tp{t, Pose2(p.at(0).get<double>(), p.at(1).get<double>(),
                                  p.at(2).get<double>())};
      (type == "truth" ? seq.ground_truth : seq.odometry).push_back(tp);
    } else if (type == "scan") {
      if (!have_meta) {
        throw std::runtime_error("sequence jsonl: scan before meta record");
      }
      Scan scan;
      scan.stamp = t;
      scan.spec = spec;
      for (const auto& r : rec.at("ranges")) {
        scan.ranges.push_back(r.is_null() ? kNoReturn : r.get<double>());
      }
      seq.scans.push_back(std::move(scan));
    } else {
      throw std::runtime_error("sequence jsonl: unknown record type '" + type +
                               "'");
    }
  }
  return seq;
}

void save_sequence(const Sequence& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << sequence_to_jsonl(seq);
}

Sequence load_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return sequence_from_jsonl(ss.str());
}

}  // namespace gridgraph
