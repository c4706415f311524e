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

#include "gridgraph/coverage.hpp"
#include "gridgraph/scenario.hpp"
#include "gridgraph/skeleton.hpp"

using namespace gridgraph;

namespace {

CellMask full_free_mask(const OccupancyGrid& g) {
  CellMask m(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      if (g.at(x, y) == CellState::Free) m.set(x, y);
    }
  }
  return m;
}

int chebyshev(const CellIndex& a, const CellIndex& b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

}  // namespace

TEST_CASE("1x5 corridor, stride 1: every cell is a waypoint in order") {
  const OccupancyGrid g(5, 1, 0.1, Pose2(), CellState::Free);
  const CellMask region = full_free_mask(g);
  const WaypointPath path = wavefront_plan(g, region, {0, 0}, 1);
  REQUIRE(path.waypoints.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(g.world_to_cell(path.waypoints[i].position()).x == i);
  }
}

TEST_CASE("1x5 corridor, stride 2: waypoints at cells 0, 2, 4") {
  const OccupancyGrid g(5, 1, 0.1, Pose2(), CellState::Free);
  const WaypointPath path =
      wavefront_plan(g, full_free_mask(g), {0, 0}, 2);
  REQUIRE(path.waypoints.size() == 3);
  CHECK(g.world_to_cell(path.waypoints[0].position()).x == 0);
  CHECK(g.world_to_cell(path.waypoints[1].position()).x == 2);
  CHECK(g.world_to_cell(path.waypoints[2].position()).x == 4);
}

TEST_CASE("L-shaped region is fully swept with backtracking at the corner") {
  // 7x7 grid, L-region: bottom row plus left column.
  OccupancyGrid g(7, 7, 0.1, Pose2(), CellState::Occupied);
  CellMask region(7, 7);
  for (int x = 0; x < 7; ++x) {
    g.set(x, 0, CellState::Free);
    region.set(x, 0);
  }
  for (int y = 1; y < 7; ++y) {
    g.set(0, y, CellState::Free);
    region.set(0, y);
  }
  const WaypointPath path = wavefront_plan(g, region, {0, 0}, 1);
  // Stride 1 emits every region cell exactly once.
  CHECK(path.waypoints.size() == region.count());
  // Both arm tips appear.
  bool tip_x = false, tip_y = false;
  for (const Pose2& wp : path.waypoints) {
    const CellIndex c = g.world_to_cell(wp.position());
    tip_x |= (c.x == 6 && c.y == 0);
    tip_y |= (c.x == 0 && c.y == 6);
  }
  CHECK(tip_x);
  CHECK(tip_y);
}

TEST_CASE("every region cell lies within stride of an emitted waypoint") {
  for (const char* name : {"office", "apartment", "symmetric"}) {
    const OccupancyGrid g = builtin_map(name);
    const CellMask skel = skeletonize(g);
    const CellMask region = dilate(g, skel, 3);
    const int stride = 5;
    const WaypointPath path =
        wavefront_plan(g, region, default_start_cell(g, region), stride);
    std::vector<CellIndex> wp_cells;
    wp_cells.reserve(path.waypoints.size());
    for (const Pose2& wp : path.waypoints) {
      wp_cells.push_back(g.world_to_cell(wp.position()));
    }
    for (int y = 0; y < region.height; ++y) {
      for (int x = 0; x < region.width; ++x) {
        if (!region.at(x, y)) continue;
        int best = 1 << 20;
        for (const CellIndex& w : wp_cells) {
          best = std::min(best, chebyshev({x, y}, w));
        }
        CAPTURE(name);
        CHECK(best <= stride);
      }
    }
  }
}

TEST_CASE("plan is deterministic for identical inputs") {
  const OccupancyGrid g = builtin_map("apartment");
  const CellMask skel = skeletonize(g);
  const CellMask region = dilate(g, skel, 2);
  const CellIndex start = default_start_cell(g, region);
  const WaypointPath a = wavefront_plan(g, region, start, 4);
  const WaypointPath b = wavefront_plan(g, region, start, 4);
  REQUIRE(a.waypoints.size() == b.waypoints.size());
  for (std::size_t i = 0; i < a.waypoints.size(); ++i) {
    CHECK(approx_equal(a.waypoints[i], b.waypoints[i]));
  }
}

TEST_CASE("invalid inputs are rejected") {
  const OccupancyGrid g(5, 5, 0.1, Pose2(), CellState::Free);
  CellMask region(5, 5);
  SUBCASE("empty region") {
    CHECK_THROWS(wavefront_plan(g, region, {0, 0}, 1));
  }
  SUBCASE("start outside region") {
    region.set(2, 2);
    CHECK_THROWS(wavefront_plan(g, region, {0, 0}, 1));
  }
  SUBCASE("disconnected region") {
    region.set(0, 0);
    region.set(4, 4);
    region.set(4, 3);
    CHECK_THROWS(wavefront_plan(g, region, {0, 0}, 1));
  }
}

TEST_CASE("single room smaller than the sensor: one central waypoint sees all") {
  OccupancyGrid g(21, 21, 0.1, Pose2(), CellState::Free);
  for (int i = 0; i < 21; ++i) {
    g.set(i, 0, CellState::Occupied);
    g.set(i, 20, CellState::Occupied);
    g.set(0, i, CellState::Occupied);
    g.set(20, i, CellState::Occupied);
  }
  WaypointPath path;
  path.region = CellMask(21, 21);
  path.waypoints = {Pose2(1.05, 1.05, 0.0)};
  ScanSpec spec;
  spec.fov = 2.0 * M_PI;
  spec.n_beams = 720;
  spec.range_max = 10.0;
  CHECK(coverage_check(g, path, spec) == doctest::Approx(1.0));
}

TEST_CASE("waypoints confined to one of two connected rooms see less") {
  // Two rooms joined by a narrow door; beams cannot sweep the whole far room.
  OccupancyGrid g(41, 21, 0.05, Pose2(), CellState::Free);
  for (int i = 0; i < 41; ++i) {
    g.set(i, 0, CellState::Occupied);
    g.set(i, 20, CellState::Occupied);
  }
  for (int i = 0; i < 21; ++i) {
    g.set(0, i, CellState::Occupied);
    g.set(40, i, CellState::Occupied);
    if (i != 10) g.set(20, i, CellState::Occupied);  // wall with 1-cell door
  }
  WaypointPath path;
  path.region = CellMask(41, 21);
  path.waypoints = {Pose2(0.25, 0.5, 0.0), Pose2(0.75, 0.5, 0.0)};
  ScanSpec spec;
  spec.fov = 2.0 * M_PI;
  spec.n_beams = 360;
  spec.range_max = 10.0;
  const double fraction = coverage_check(g, path, spec);
  CHECK(fraction < 1.0);
  CHECK(fraction > 0.3);
}

TEST_CASE("full pipeline coverage on the three-room apartment map") {
  const OccupancyGrid g = builtin_map("apartment");
  const CellMask skel = skeletonize(g);
  const CellMask region = dilate(g, skel, 3);
  const WaypointPath path =
      wavefront_plan(g, region, default_start_cell(g, region), 5);
  ScanSpec spec;  // default 270-degree sensor
  CHECK(coverage_check(g, path, spec) >= 0.99);
}

TEST_CASE("waypoint CSV fits the idx,x,y,theta schema") {
  const OccupancyGrid g(5, 1, 0.1, Pose2(), CellState::Free);
  const WaypointPath path =
      wavefront_plan(g, full_free_mask(g), {0, 0}, 2);
  const std::string csv = waypoints_to_csv(path);
  CHECK(csv.rfind("idx,x,y,theta\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
}
