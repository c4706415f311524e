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

#ifndef GRIDGRAPH_COVERAGE_HPP
#define GRIDGRAPH_COVERAGE_HPP

#include <string>

#include "gridgraph/lidar.hpp"

namespace gridgraph {

struct WaypointPath {
  // Cell centers in world coordinates; heading points to the next waypoint,
  // the last heading is repeated.
  std::vector<Pose2> waypoints;
  CellMask region;
};

// Breadth-first wavefront labeling from `start`, then a steepest-ascent
// sweep with backtracking that enters every region cell exactly once. The
// waypoint list is the visit order downsampled to at least `stride` steps
// along the visit path; start and final cell are always emitted, and every
// region cell ends up within `stride` (Chebyshev) of an emitted waypoint.
// The region must be 8-connected from `start`.
WaypointPath wavefront_plan(const OccupancyGrid& grid, const CellMask& region,
                            const CellIndex& start, int stride);

// Region cell nearest to the grid centroid; deterministic default start.
CellIndex default_start_cell(const OccupancyGrid& grid,
                             const CellMask& region);

// Fraction of reachable Free cells crossed by at least one beam from any
// waypoint. Reachable = Free cells 8-connected to a waypoint cell.
double coverage_check(const OccupancyGrid& grid, const WaypointPath& path,
                      const ScanSpec& spec);

// `idx,x,y,theta` rows for inspection.
std::string waypoints_to_csv(const WaypointPath& path);

}  // namespace gridgraph

#endif  // GRIDGRAPH_COVERAGE_HPP
