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

#ifndef GRIDGRAPH_GBL_HPP
#define GRIDGRAPH_GBL_HPP

#include <optional>

#include "gridgraph/pose_graph.hpp"

namespace gridgraph {

struct MatchResult {
  Pose2 pose;  // global
  double score = 0.0;
  bool accepted = false;
};

struct SearchWindow {
  double x = 0.3;                        // +- m
  double y = 0.3;                        // +- m
  double theta = 5.0 * M_PI / 180.0;     // +- rad
};

struct GblConfig {
  SearchWindow window;
  double min_score = 0.55;
  int window_size = 10;  // sliding window W
  int max_blind = 20;    // consecutive rejected steps before divergence
  std::array<double, 3> odom_info_diag = {50.0, 50.0, 100.0};
  std::array<double, 3> matcher_info_diag = {400.0, 400.0, 1000.0};
};

// Exhaustive correlative search over the discretized window: a coarse pass
// on a max-pooled grid gives admissible upper bounds, then candidates are
// refined best-first at full resolution until the bound closes. Identical
// optimum to plain exhaustive search, deterministic tie-breaks.
MatchResult match(const Scan& scan, const Submap& submap, const Pose2& initial,
                  const SearchWindow& window, const GblConfig& cfg);

// Sliding-window state: recent nodes plus odometry/matcher constraints.
// Matcher constraints reference fixed prior-map submap frames.
struct WindowState {
  struct Node {
    int id = 0;
    Pose2 pose;
    double stamp = 0.0;
  };
  struct WindowConstraint {
    bool from_is_fixed = false;  // true: from_pose is a prior-map submap
    int from = -1;               // node index when !from_is_fixed
    Pose2 from_pose;             // fixed frame when from_is_fixed
    int to = 0;                  // node index
    Pose2 relative;
    Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
  };
  std::vector<Node> nodes;
  std::vector<WindowConstraint> constraints;
};

struct OptimizeReport {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  bool singular = false;
  // Cost after every accepted step, for the monotonicity check.
  std::vector<double> accepted_costs;
};

// Weighted least squares over the window poses solved with
// Levenberg-Marquardt; residuals are pose differences with the angle wrapped
// to (-pi, pi], prior-map frames stay fixed.
OptimizeReport optimize_window(WindowState& state);

struct TrackStepDiagnostics {
  double stamp = 0.0;
  int submap_id = -1;
  double score = 0.0;
  bool accepted = false;
  double cost_before = 0.0;
  double cost_after = 0.0;
  bool blind = false;
  bool diverged = false;
};

struct TrackResult {
  Trajectory trajectory;
  std::vector<TrackStepDiagnostics> diagnostics;
  bool diverged = false;
};

// Per scan: odometry prediction, correlative match against the two nearest
// prior submaps, window optimization, emit the newest pose. Rejected steps
// fall back to dead reckoning; too many consecutive rejections raise the
// divergence flag.
TrackResult track(const PoseGraphMap& map, const Sequence& seq,
                  const Pose2& initial, const GblConfig& cfg = GblConfig{});

std::string track_diagnostics_csv(const TrackResult& result);

}  // namespace gridgraph

#endif  // GRIDGRAPH_GBL_HPP
