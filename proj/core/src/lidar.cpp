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

#include "gridgraph/lidar.hpp"

#include <cmath>
#include <stdexcept>

namespace gridgraph {

void ScanSpec::validate() const {
  if (!(fov > 0.0 && fov <= 2.0 * M_PI + 1e-12)) {
    throw std::runtime_error("scan spec: fov out of (0, 2pi]");
  }
  if (n_beams < 2) throw std::runtime_error("scan spec: n_beams < 2");
  if (!(range_min >= 0.0 && range_min < range_max)) {
    throw std::runtime_error("scan spec: need 0 <= range_min < range_max");
  }
  if (rate <= 0.0) throw std::runtime_error("scan spec: rate <= 0");
  if (noise_sigma < 0.0) throw std::runtime_error("scan spec: noise < 0");
}

void traverse_ray(const OccupancyGrid& grid, const Point2& origin,
                  double bearing, double range_max,
                  const std::function<bool(const CellIndex&, double)>& visit) {
  const double res = grid.resolution();
  // Work in the grid-local frame; distances are invariant under the rigid
  // origin transform.
  const Point2 local = grid.world_to_local(origin);
  const double local_bearing = bearing - grid.origin().theta;
  const double dx = std::cos(local_bearing);
  const double dy = std::sin(local_bearing);

  CellIndex cell{static_cast<int>(std::floor(local.x / res)),
                 static_cast<int>(std::floor(local.y / res))};
  if (!grid.in_bounds(cell)) {
    throw std::runtime_error("traverse_ray: origin out of grid bounds");
  }

  const int step_x = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
  const int step_y = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double t_delta_x = step_x != 0 ? res / std::abs(dx) : kInf;
  const double t_delta_y = step_y != 0 ? res / std::abs(dy) : kInf;

  double t_max_x = kInf;
  if (step_x > 0) {
    t_max_x = ((cell.x + 1) * res - local.x) / dx;
  } else if (step_x < 0) {
    t_max_x = (cell.x * res - local.x) / dx;
  }
  double t_max_y = kInf;
  if (step_y > 0) {
    t_max_y = ((cell.y + 1) * res - local.y) / dy;
  } else if (step_y < 0) {
    t_max_y = (cell.y * res - local.y) / dy;
  }

  double t_entry = 0.0;
  while (true) {
    if (!visit(cell, t_entry)) return;
    if (t_max_x < t_max_y) {
      t_entry = t_max_x;
      t_max_x += t_delta_x;
      cell.x += step_x;
    } else {
      t_entry = t_max_y;
      t_max_y += t_delta_y;
      cell.y += step_y;
    }
    if (t_entry > range_max) return;
    if (!grid.in_bounds(cell)) return;
  }
}

double cast_ray(const OccupancyGrid& grid, const Point2& origin,
                double bearing, double range_max) {
  double hit = kNoReturn;
  traverse_ray(grid, origin, bearing, range_max,
               [&](const CellIndex& cell, double t_entry) {
                 if (grid.at(cell) == CellState::Occupied) {
                   hit = t_entry;
                   return false;
                 }
                 return true;
               });
  return hit;
}

Scan simulate_scan(const OccupancyGrid& grid, const Pose2& pose,
                   const ScanSpec& spec, Rng& rng) {
  spec.validate();
  Scan scan;
  scan.spec = spec;
  scan.ranges.resize(spec.n_beams, kNoReturn);
  for (int i = 0; i < spec.n_beams; ++i) {
    const double bearing = pose.theta + spec.bearing(i);
    double r = cast_ray(grid, pose.position(), bearing, spec.range_max);
    if (is_return(r)) {
      r += rng.normal(spec.noise_sigma);
      r = std::min(std::max(r, spec.range_min), spec.range_max);
    }
    scan.ranges[i] = r;
  }
  return scan;
}

Scan simulate_scan(const OccupancyGrid& grid, const Pose2& pose,
                   const ScanSpec& spec, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return simulate_scan(grid, pose, spec, rng);
}

}  // namespace gridgraph
