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

#include "gridgraph/coverage.hpp"

#include <array>
#include <cstdio>
#include <deque>
#include <stdexcept>

namespace gridgraph {

namespace {

// Fixed tie-break order: E, NE, N, NW, W, SW, S, SE.
constexpr std::array<std::array<int, 2>, 8> kNeighborOrder = {{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1},
}};

}  // namespace

CellIndex default_start_cell(const OccupancyGrid& grid,
                             const CellMask& region) {
  const double cx = grid.width() / 2.0;
  const double cy = grid.height() / 2.0;
  CellIndex best{-1, -1};
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int y = 0; y < region.height; ++y) {
    for (int x = 0; x < region.width; ++x) {
      if (!region.at(x, y)) continue;
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = {x, y};
      }
    }
  }
  if (best.x < 0) throw std::runtime_error("default_start_cell: empty region");
  return best;
}

WaypointPath wavefront_plan(const OccupancyGrid& grid, const CellMask& region,
                            const CellIndex& start, int stride) {
  if (!region.matches(grid)) {
    throw std::runtime_error("wavefront_plan: region dimension mismatch");
  }
  if (region.count() == 0) throw std::runtime_error("wavefront_plan: empty region");
  if (!region.in_bounds(start.x, start.y) || !region.at(start.x, start.y)) {
    throw std::runtime_error("wavefront_plan: start not in region");
  }
  if (stride < 1) throw std::runtime_error("wavefront_plan: stride < 1");

  const int w = region.width;
  const int h = region.height;
  auto idx = [w](const CellIndex& c) {
    return static_cast<std::size_t>(c.y) * w + c.x;
  };

  // Wavefront: 8-connected BFS distance from start over region cells.
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::deque<CellIndex> queue;
  label[idx(start)] = 0;
  queue.push_back(start);
  std::size_t reached = 0;
  while (!queue.empty()) {
    const CellIndex c = queue.front();
    queue.pop_front();
    ++reached;
    for (const auto& d : kNeighborOrder) {
      const CellIndex n{c.x + d[0], c.y + d[1]};
      if (n.x < 0 || n.y < 0 || n.x >= w || n.y >= h) continue;
      if (!region.at(n.x, n.y) || label[idx(n)] >= 0) continue;
      label[idx(n)] = label[idx(c)] + 1;
      queue.push_back(n);
    }
  }
  if (reached != region.count()) {
    throw std::runtime_error(
        "wavefront_plan: region is not connected from start");
  }

  // Sweep: always climb to the unvisited neighbor with the highest label,
  // backtrack along the visited trail when stuck.
  std::vector<std::uint8_t> visited(label.size(), 0);
  std::vector<CellIndex> trail;       // movement stack for backtracking
  std::vector<CellIndex> visit_path;  // every move, backtracks included
  visited[idx(start)] = 1;
  trail.push_back(start);
  visit_path.push_back(start);
  std::size_t new_cells = 1;
  CellIndex current = start;

  while (new_cells < reached) {
    CellIndex next{-1, -1};
    int best_label = -1;
    for (const auto& d : kNeighborOrder) {
      const CellIndex n{current.x + d[0], current.y + d[1]};
      if (n.x < 0 || n.y < 0 || n.x >= w || n.y >= h) continue;
      if (!region.at(n.x, n.y) || visited[idx(n)]) continue;
      if (label[idx(n)] > best_label) {
        best_label = label[idx(n)];
        next = n;
      }
    }
    if (next.x >= 0) {
      visited[idx(next)] = 1;
      ++new_cells;
      trail.push_back(next);
      visit_path.push_back(next);
      current = next;
    } else {
      trail.pop_back();
      if (trail.empty()) break;  // unreachable given the BFS check above
      current = trail.back();
      visit_path.push_back(current);
    }
  }

  // Downsample: emit a newly visited cell once at least `stride` moves have
  // passed since the previous emission; start and final cell always emitted.
  std::vector<CellIndex> emitted;
  std::vector<std::uint8_t> seen(label.size(), 0);
  emitted.push_back(start);
  seen[idx(start)] = 1;
  int steps_since_emit = 0;
  for (std::size_t i = 1; i < visit_path.size(); ++i) {
    ++steps_since_emit;
    const CellIndex& c = visit_path[i];
    if (seen[idx(c)]) continue;  // backtrack move
    seen[idx(c)] = 1;
    if (steps_since_emit >= stride) {
      emitted.push_back(c);
      steps_since_emit = 0;
    }
  }
  const CellIndex& last = visit_path.back();
  if (emitted.back() != last) emitted.push_back(last);

  WaypointPath path;
  path.region = region;
  path.waypoints.reserve(emitted.size());
  for (std::size_t i = 0; i < emitted.size(); ++i) {
    const Point2 p = grid.cell_to_world(emitted[i]);
    double heading = 0.0;
    if (i + 1 < emitted.size()) {
      const Point2 q = grid.cell_to_world(emitted[i + 1]);
      heading = std::atan2(q.y - p.y, q.x - p.x);
    } else if (!path.waypoints.empty()) {
      heading = path.waypoints.back().theta;
    }
    path.waypoints.emplace_back(p.x, p.y, heading);
  }
  return path;
}

double coverage_check(const OccupancyGrid& grid, const WaypointPath& path,
                      const ScanSpec& spec) {
  spec.validate();
  const int w = grid.width();
  const int h = grid.height();
  std::vector<std::uint8_t> seen_free(static_cast<std::size_t>(w) * h, 0);

  for (const Pose2& wp : path.waypoints) {
    for (int b = 0; b < spec.n_beams; ++b) {
      const double bearing = wp.theta + spec.bearing(b);
      traverse_ray(grid, wp.position(), bearing, spec.range_max,
                   [&](const CellIndex& cell, double) {
                     const CellState s = grid.at(cell);
                     if (s == CellState::Occupied) return false;
                     if (s == CellState::Free) {
                       seen_free[static_cast<std::size_t>(cell.y) * w +
                                 cell.x] = 1;
                     }
                     return true;  // Unknown is transparent
                   });
    }
  }

  // Reachable = Free cells 8-connected to any waypoint cell.
  std::vector<std::uint8_t> reachable(static_cast<std::size_t>(w) * h, 0);
  std::vector<CellIndex> stack;
  for (const Pose2& wp : path.waypoints) {
    const CellIndex c = grid.world_to_cell(wp.position());
    if (!grid.in_bounds(c) || grid.at(c) != CellState::Free) continue;
    const std::size_t i = static_cast<std::size_t>(c.y) * w + c.x;
    if (!reachable[i]) {
      reachable[i] = 1;
      stack.push_back(c);
    }
  }
  while (!stack.empty()) {
    const CellIndex c = stack.back();
    stack.pop_back();
    for (const auto& d : kNeighborOrder) {
      const CellIndex n{c.x + d[0], c.y + d[1]};
      if (!grid.in_bounds(n) || grid.at(n) != CellState::Free) continue;
      const std::size_t i = static_cast<std::size_t>(n.y) * w + n.x;
      if (reachable[i]) continue;
      reachable[i] = 1;
      stack.push_back(n);
    }
  }

  std::size_t n_reachable = 0;
  std::size_t n_seen = 0;
  for (std::size_t i = 0; i < reachable.size(); ++i) {
    if (!reachable[i]) continue;
    ++n_reachable;
    n_seen += seen_free[i];
  }
  if (n_reachable == 0) return 0.0;
  return static_cast<double>(n_seen) / static_cast<double>(n_reachable);
}

std::string waypoints_to_csv(const WaypointPath& path) {
  std::string out = "idx,x,y,theta\n";
  char buf[128];
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const Pose2& p = path.waypoints[i];
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6f\n", i, p.x, p.y,
                  p.theta);
    out += buf;
  }
  return out;
}

}  // namespace gridgraph
