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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gridgraph/pose_graph.hpp"

using namespace gridgraph;

namespace {

OccupancyGrid walled_box(double w_m, double h_m, double res) {
  const int w = static_cast<int>(w_m / res);
  const int h = static_cast<int>(h_m / res);
  OccupancyGrid g(w, h, res, Pose2(), CellState::Free);
  for (int x = 0; x < w; ++x) {
    g.set(x, 0, CellState::Occupied);
    g.set(x, h - 1, CellState::Occupied);
  }
  for (int y = 0; y < h; ++y) {
    g.set(0, y, CellState::Occupied);
    g.set(w - 1, y, CellState::Occupied);
  }
  return g;
}

// Straight-line scan sequence through the box.
Sequence line_sequence(const OccupancyGrid& g, int n_scans,
                       double step = 0.25) {
  Trajectory traj;
  for (int i = 0; i < n_scans; ++i) {
    traj.push_back({i * 0.1, Pose2(1.0 + i * step, 1.5, 0.0)});
  }
  ScanSpec spec;
  spec.n_beams = 181;
  spec.fov = 1.5 * M_PI;
  spec.noise_sigma = 0.0;
  spec.rate = 10.0;
  return simulate_sequence(g, traj, spec, OdomNoise{}, {}, 1u);
}

}  // namespace

TEST_CASE("K scans produce exactly one submap") {
  const OccupancyGrid g = walled_box(12, 4, 0.1);
  BuildParams params;
  params.nodes_per_submap = 10;
  const Sequence seq = line_sequence(g, 10);
  const PoseGraphMap map = build_from_sequence(seq, params);
  CHECK(map.submaps.size() == 1);
  CHECK(map.nodes.size() == 10);
  // One NodeToSubmap per node plus odometry chain.
  std::size_t node_submap = 0, node_node = 0;
  for (const auto& c : map.constraints) {
    (c.kind == Constraint::Kind::NodeToSubmap ? node_submap : node_node) += 1;
  }
  CHECK(node_submap == 10);
  CHECK(node_node == 9);
}

TEST_CASE("a single flat-wall scan writes misses along beams, hits at ends") {
  const OccupancyGrid g = walled_box(10, 6, 0.1);
  const Sequence seq = line_sequence(g, 1);
  const PoseGraphMap map = build_from_sequence(seq);
  REQUIRE(map.submaps.size() == 1);
  const Submap& sm = map.submaps[0];

  std::size_t below = 0, above = 0;
  int x, y;
  // Cell right in front of the sensor along +x is traversed (miss).
  REQUIRE(sm.cell_of({2.0, 1.5}, x, y));
  CHECK(sm.observed(x, y));
  CHECK(sm.probability(x, y) < 0.5);
  // Wall endpoint cells carry hits.
  for (std::size_t i = 0; i < sm.cells.size(); ++i) {
    if (sm.cells[i] == 0) continue;
    const double p = (sm.cells[i] - 1) / 254.0;
    (p > 0.5 ? above : below) += 1;
  }
  CHECK(above > 0);
  CHECK(below > above);  // interior misses dominate a rectangular room
}

TEST_CASE("2K+1 scans give 3 submaps and doubly-constrained middle nodes") {
  const OccupancyGrid g = walled_box(14, 4, 0.1);
  BuildParams params;
  params.nodes_per_submap = 8;
  const Sequence seq = line_sequence(g, 17, 0.2);  // 2K+1 = 17
  const PoseGraphMap map = build_from_sequence(seq, params);
  CHECK(map.submaps.size() == 3);
  std::vector<int> per_node(17, 0);
  for (const auto& c : map.constraints) {
    if (c.kind == Constraint::Kind::NodeToSubmap) per_node[c.to_id] += 1;
  }
  for (int i = 0; i < 17; ++i) {
    CHECK(per_node[i] == (i < 8 ? 1 : 2));
  }
}

TEST_CASE("build validates inputs") {
  CHECK_THROWS(build_from_sequence(Sequence{}));
}

TEST_CASE("constraint residuals vanish at build time") {
  const OccupancyGrid g = walled_box(12, 4, 0.1);
  const Sequence seq = line_sequence(g, 12);
  const PoseGraphMap map = build_from_sequence(seq);
  for (const auto& c : map.constraints) {
    Pose2 from;
    if (c.kind == Constraint::Kind::NodeToSubmap) {
      from = map.submaps[c.from_id].origin;
    } else {
      from = map.nodes[c.from_id].pose;
    }
    const Pose2 cur = from.between(map.nodes[c.to_id].pose);
    CHECK(cur.x == doctest::Approx(c.relative.x).epsilon(1e-12));
    CHECK(cur.y == doctest::Approx(c.relative.y).epsilon(1e-12));
    CHECK(normalize_angle(cur.theta - c.relative.theta) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("node/submap counts and graph connectivity invariants") {
  const OccupancyGrid g = walled_box(14, 5, 0.1);
  BuildParams params;
  params.nodes_per_submap = 7;
  for (const int n : {3, 7, 8, 20, 23}) {
    const Sequence seq = line_sequence(g, n, 0.12);
    const PoseGraphMap map = build_from_sequence(seq, params);
    CHECK(map.nodes.size() == static_cast<std::size_t>(n));
    CHECK(map.submaps.size() ==
          static_cast<std::size_t>((n + params.nodes_per_submap - 1) /
                                   params.nodes_per_submap));
    CHECK(graph_connected(map));
    for (const auto& c : map.constraints) {
      CHECK(information_spd(c.information));
    }
  }
}

TEST_CASE("serialize/deserialize is an exact round trip") {
  const OccupancyGrid g = walled_box(12, 4, 0.1);
  const Sequence seq = line_sequence(g, 12);
  const PoseGraphMap map = build_from_sequence(seq);
  const PoseGraphMap back = deserialize(serialize(map));

  REQUIRE(back.nodes.size() == map.nodes.size());
  REQUIRE(back.submaps.size() == map.submaps.size());
  REQUIRE(back.constraints.size() == map.constraints.size());
  CHECK(back.source_grid_hash == map.source_grid_hash);
  for (std::size_t i = 0; i < map.nodes.size(); ++i) {
    CHECK(back.nodes[i].id == map.nodes[i].id);
    CHECK(back.nodes[i].pose.x == map.nodes[i].pose.x);
    CHECK(back.nodes[i].pose.y == map.nodes[i].pose.y);
    CHECK(back.nodes[i].pose.theta == map.nodes[i].pose.theta);
    CHECK(back.nodes[i].scan.ranges.size() == map.nodes[i].scan.ranges.size());
    for (std::size_t b = 0; b < map.nodes[i].scan.ranges.size(); ++b) {
      const double r0 = map.nodes[i].scan.ranges[b];
      const double r1 = back.nodes[i].scan.ranges[b];
      if (is_return(r0)) {
        CHECK(r0 == r1);
      } else {
        CHECK_FALSE(is_return(r1));
      }
    }
  }
  for (std::size_t s = 0; s < map.submaps.size(); ++s) {
    CHECK(back.submaps[s].cells == map.submaps[s].cells);
    CHECK(back.submaps[s].local_min.x == map.submaps[s].local_min.x);
    CHECK(back.submaps[s].inserted_nodes == map.submaps[s].inserted_nodes);
  }
  for (std::size_t c = 0; c < map.constraints.size(); ++c) {
    CHECK(back.constraints[c].kind == map.constraints[c].kind);
    CHECK(back.constraints[c].relative.x == map.constraints[c].relative.x);
    CHECK(back.constraints[c].information == map.constraints[c].information);
  }
}

TEST_CASE("empty map serializes to a valid container") {
  const PoseGraphMap map;
  const PoseGraphMap back = deserialize(serialize(map));
  CHECK(back.nodes.empty());
  CHECK(back.submaps.empty());
  CHECK(back.constraints.empty());
}

TEST_CASE("a non-SPD information matrix is rejected on load") {
  const OccupancyGrid g = walled_box(12, 4, 0.1);
  const Sequence seq = line_sequence(g, 3);
  PoseGraphMap map = build_from_sequence(seq);
  // Eigenvalues of [[1,2,0],[2,1,0],[0,0,1]] are 3, -1, 1.
  map.constraints[0].information << 1, 2, 0, 2, 1, 0, 0, 0, 1;
  CHECK_FALSE(information_spd(map.constraints[0].information));
  const std::string bytes = serialize(map);
  CHECK_THROWS_WITH_AS(deserialize(bytes),
                       doctest::Contains("not SPD"), std::runtime_error);
}

TEST_CASE("schema version and corrupt payloads are rejected") {
  CHECK_THROWS(deserialize("{\"pgbm_schema\": 2}"));
  CHECK_THROWS(deserialize("not json"));
  SUBCASE("corrupt base64") {
    const OccupancyGrid g = walled_box(12, 4, 0.1);
    const PoseGraphMap map = build_from_sequence(line_sequence(g, 3));
    std::string bytes = serialize(map);
    const auto pos = bytes.find("\"cells\":\"");
    REQUIRE(pos != std::string::npos);
    bytes[pos + 9] = '!';
    CHECK_THROWS(deserialize(bytes));
  }
}

TEST_CASE("rasterize_global: empty map gives an all-Unknown grid") {
  const OccupancyGrid out = rasterize_global(PoseGraphMap{}, 0.05);
  CHECK(out.count(CellState::Unknown) == out.size());
}

TEST_CASE("rasterization recovers the source walls with IoU >= 0.85") {
  // 15x15 m two-room map.
  OccupancyGrid g = walled_box(15, 15, 0.05);
  const int wall_x = static_cast<int>(7.5 / 0.05);
  for (int y = 0; y < g.height(); ++y) {
    g.set(wall_x, y, CellState::Occupied);
  }
  for (int y = g.height() / 2 - 10; y < g.height() / 2 + 10; ++y) {
    g.set(wall_x, y, CellState::Free);  // door between the rooms
  }

  // Sweep both rooms.
  Trajectory traj;
  double t = 0.0;
  auto add_leg = [&](Point2 a, Point2 b, double heading) {
    const int steps = 40;
    for (int i = 0; i <= steps; ++i) {
      traj.push_back({t, Pose2(a.x + (b.x - a.x) * i / steps,
                               a.y + (b.y - a.y) * i / steps, heading)});
      t += 0.1;
    }
  };
  add_leg({1.0, 1.0}, {6.5, 1.0}, 0.0);
  add_leg({6.5, 1.0}, {6.5, 13.5}, M_PI / 2);
  add_leg({6.5, 13.5}, {1.0, 13.5}, M_PI);
  add_leg({1.0, 13.5}, {1.0, 7.5}, -M_PI / 2);
  add_leg({1.0, 7.5}, {7.4, 7.5}, 0.0);   // through the door
  add_leg({7.6, 7.5}, {13.5, 7.5}, 0.0);  // right room
  add_leg({13.5, 7.5}, {13.5, 2.0}, -M_PI / 2);
  add_leg({13.5, 2.0}, {9.0, 12.0}, M_PI / 2);

  ScanSpec spec;
  spec.n_beams = 361;
  spec.fov = 2.0 * M_PI;
  spec.noise_sigma = 0.0;
  const Sequence seq = simulate_sequence(g, traj, spec, OdomNoise{}, {}, 2u);
  const PoseGraphMap map = build_from_sequence(seq);
  const OccupancyGrid raster = rasterize_global(map, 0.05);

  // IoU over source-Occupied vs rasterized-Occupied, restricted to cells any
  // beam observed (cells the rasterization marked non-Unknown).
  std::size_t inter = 0, uni = 0;
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      const Point2 w = g.cell_to_world({x, y});
      const CellIndex rc = raster.world_to_cell(w);
      if (!raster.in_bounds(rc)) continue;
      const bool src_occ = g.at(x, y) == CellState::Occupied;
      const bool ras_occ = raster.at(rc) == CellState::Occupied;
      const bool observed = raster.at(rc) != CellState::Unknown;
      if (!observed && !ras_occ) continue;
      if (src_occ && ras_occ) ++inter;
      if (src_occ || ras_occ) ++uni;
    }
  }
  REQUIRE(uni > 0);
  const double iou = static_cast<double>(inter) / static_cast<double>(uni);
  CHECK(iou >= 0.85);
}

TEST_CASE("two spatially disjoint submaps both appear in the global raster") {
  const OccupancyGrid g = walled_box(30, 4, 0.1);
  BuildParams params;
  params.nodes_per_submap = 5;
  // Two separate five-scan bursts far apart.
  Trajectory traj;
  ScanSpec spec;
  spec.n_beams = 361;
  spec.fov = 2.0 * M_PI;
  spec.range_max = 4.0;
  spec.noise_sigma = 0.0;
  for (int i = 0; i < 5; ++i) traj.push_back({i * 0.1, Pose2(2.0, 2.0, 0.0)});
  for (int i = 0; i < 5; ++i) {
    traj.push_back({0.5 + i * 0.1, Pose2(27.0, 2.0, M_PI)});
  }
  const Sequence seq = simulate_sequence(g, traj, spec, OdomNoise{}, {}, 3u);
  const PoseGraphMap map = build_from_sequence(seq, params);
  REQUIRE(map.submaps.size() == 2);
  const OccupancyGrid raster = rasterize_global(map, 0.1);
  // Walls near both bursts were observed.
  std::size_t occ = raster.count(CellState::Occupied);
  CHECK(occ > 0);
  bool left_occ = false, right_occ = false;
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width() / 3; ++x) {
      left_occ |= raster.at(x, y) == CellState::Occupied;
    }
    for (int x = 2 * raster.width() / 3; x < raster.width(); ++x) {
      right_occ |= raster.at(x, y) == CellState::Occupied;
    }
  }
  CHECK(left_occ);
  CHECK(right_occ);
}

TEST_CASE("base64 helpers reject malformed input and round trip bytes") {
  std::vector<std::uint8_t> data;
  for (int i = 0; i < 300; ++i) data.push_back(static_cast<std::uint8_t>(i));
  const std::string text = base64_encode(data.data(), data.size());
  CHECK(base64_decode(text) == data);
  CHECK_THROWS(base64_decode("abc"));
  CHECK_THROWS(base64_decode("a!=="));
  CHECK_THROWS(base64_decode("=aaa"));
}
