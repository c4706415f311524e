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

#ifndef GRIDGRAPH_POSE_GRAPH_HPP
#define GRIDGRAPH_POSE_GRAPH_HPP

#include <Eigen/Core>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gridgraph/sequence.hpp"

namespace gridgraph {

struct GraphNode {
  int id = 0;
  Pose2 pose;  // global
  double stamp = 0.0;
  Scan scan;
};

// Local probability grid anchored at a global origin pose. Cell bytes:
// 0 = never observed, 1..255 = probability (b-1)/254.
struct Submap {
  int id = 0;
  Pose2 origin;
  double resolution = 0.05;
  int width = 0;
  int height = 0;
  Point2 local_min;  // local-frame coordinates of the corner of cell (0,0)
  std::vector<std::uint8_t> cells;
  std::vector<int> inserted_nodes;

  bool observed(int x, int y) const {
    return cells[static_cast<std::size_t>(y) * width + x] != 0;
  }
  double probability(int x, int y) const {
    const std::uint8_t b = cells[static_cast<std::size_t>(y) * width + x];
    return b == 0 ? 0.5 : (b - 1) / 254.0;
  }
  bool cell_of(const Point2& world, int& x, int& y) const;
  // Probability at a world point, 0 for unobserved or out-of-submap cells.
  double probability_at(const Point2& world) const;
};

struct Constraint {
  enum class Kind { NodeToSubmap, NodeToNode };
  Kind kind = Kind::NodeToSubmap;
  int from_id = 0;  // submap id or node id depending on kind
  int to_id = 0;    // node id
  Pose2 relative;   // from frame -> to frame
  Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
};

struct BuildParams {
  int nodes_per_submap = 30;
  double hit_prob = 0.7;
  double miss_prob = 0.4;
  double submap_resolution = 0.05;
  std::array<double, 3> matcher_info_diag = {400.0, 400.0, 1000.0};
  std::array<double, 3> odom_info_diag = {50.0, 50.0, 100.0};
};

struct PoseGraphMap {
  std::vector<GraphNode> nodes;
  std::vector<Submap> submaps;
  std::vector<Constraint> constraints;
  std::string source_grid_hash;
  BuildParams params;

  bool empty() const { return nodes.empty() && submaps.empty(); }
};

// One node per scan at its ground-truth pose; a new submap every K nodes;
// every scan inserted into the current and the previous submap via log-odds
// hit/miss updates. No graph optimization happens: poses are exact, so every
// constraint residual is zero at build time.
PoseGraphMap build_from_sequence(const Sequence& seq,
                                 const BuildParams& params = BuildParams{});

// Versioned JSON container (`pgbm_schema: 1`); probability grids as base64
// of the row-major quantized bytes. Round trips are lossless.
std::string serialize(const PoseGraphMap& map);
PoseGraphMap deserialize(const std::string& bytes);
void save_pgbm(const PoseGraphMap& map, const std::string& path);
PoseGraphMap load_pgbm(const std::string& path);

// Projects every submap into one global trinary grid: Occupied where the
// max probability exceeds 0.65, Free below 0.196, Unknown elsewhere or when
// never observed.
OccupancyGrid rasterize_global(const PoseGraphMap& map, double resolution);

// True when every information matrix is symmetric positive definite.
bool information_spd(const Eigen::Matrix3d& info);

// True when all nodes and submaps form one connected component through the
// constraints.
bool graph_connected(const PoseGraphMap& map);

std::string base64_encode(const std::uint8_t* data, std::size_t n);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace gridgraph

#endif  // GRIDGRAPH_POSE_GRAPH_HPP
