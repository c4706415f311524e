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

#ifndef GRIDGRAPH_SEQUENCE_HPP
#define GRIDGRAPH_SEQUENCE_HPP

#include <string>
#include <vector>

#include "gridgraph/coverage.hpp"
#include "gridgraph/lidar.hpp"
#include "gridgraph/trajectory.hpp"

namespace gridgraph {

// Dynamic obstacle walking a polyline. With loop=true the agent restarts
// from its initial position after reaching the end.
struct Agent {
  std::vector<Point2> path;
  double speed = 1.2;   // m/s
  double radius = 0.25; // m
  bool loop = true;

  Point2 position_at(double t) const;
};

// Standard four-parameter odometry noise (rot1/trans/rot2 decomposition);
// the alphas are variance scale factors.
struct OdomNoise {
  double alpha1 = 0.0;  // rot on rot
  double alpha2 = 0.0;  // rot on trans
  double alpha3 = 0.0;  // trans on trans
  double alpha4 = 0.0;  // trans on rot
};

struct MotionLimits {
  double linear = 1.0;                     // m/s
  double angular = 1.0 * M_PI / 180.0;     // rad/s
};

struct Sequence {
  Trajectory ground_truth;
  Trajectory odometry;
  std::vector<Scan> scans;
  std::uint64_t static_map_id = 0;
};

// Walks the waypoint path under the motion limits, sampling poses at
// spec.rate, and simulates a scan at every sample with agents rasterized as
// Occupied disks into a scratch copy of the grid. Odometry accumulates
// ground-truth increments corrupted by the noise model.
Sequence simulate_sequence(const OccupancyGrid& grid, const WaypointPath& path,
                           const ScanSpec& spec, const OdomNoise& odom_noise,
                           const std::vector<Agent>& agents,
                           std::uint64_t rng_seed,
                           const MotionLimits& limits = MotionLimits{},
                           const Pose2& initial_odom_offset = Pose2{});

// Same, but for an externally supplied timestamped trajectory.
Sequence simulate_sequence(const OccupancyGrid& grid,
                           const Trajectory& trajectory, const ScanSpec& spec,
                           const OdomNoise& odom_noise,
                           const std::vector<Agent>& agents,
                           std::uint64_t rng_seed,
                           const Pose2& initial_odom_offset = Pose2{});

// Timestamped poses along a waypoint path under the motion limits, sampled
// at `rate` Hz.
Trajectory sample_path_trajectory(const WaypointPath& path,
                                  const MotionLimits& limits, double rate);

// Composes the rot1/trans/rot2 noisy increment for a true delta.
Pose2 sample_odometry_delta(const Pose2& true_delta, const OdomNoise& noise,
                            Rng& rng);

// JSON-lines container: one meta record, then `truth`/`odom`/`scan` records
// ordered by timestamp. No-return ranges are encoded as null.
std::string sequence_to_jsonl(const Sequence& seq);
Sequence sequence_from_jsonl(const std::string& text);
void save_sequence(const Sequence& seq, const std::string& path);
Sequence load_sequence(const std::string& path);

}  // namespace gridgraph

#endif  // GRIDGRAPH_SEQUENCE_HPP
