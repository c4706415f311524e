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

#ifndef GRIDGRAPH_LIDAR_HPP
#define GRIDGRAPH_LIDAR_HPP

#include <functional>
#include <limits>
#include <vector>

#include "gridgraph/grid.hpp"
#include "gridgraph/random.hpp"

namespace gridgraph {

struct ScanSpec {
  double fov = 270.0 * M_PI / 180.0;
  int n_beams = 1081;
  double range_min = 0.06;
  double range_max = 10.0;
  double rate = 40.0;  // Hz
  double noise_sigma = 0.01;

  void validate() const;
  double bearing(int beam) const {
    return -fov / 2.0 + fov * beam / (n_beams - 1);
  }
};

constexpr double kNoReturn = std::numeric_limits<double>::quiet_NaN();

inline bool is_return(double range) { return !std::isnan(range); }

struct Scan {
  double stamp = 0.0;
  std::vector<double> ranges;  // NaN = no return
  ScanSpec spec;
};

// Visits the cells crossed by a ray in order. The callback receives the cell
// and the distance at which the ray enters it; returning false stops the
// walk. Traversal is exact (no skipped cells) and stops at range_max or the
// grid border.
void traverse_ray(const OccupancyGrid& grid, const Point2& origin,
                  double bearing, double range_max,
                  const std::function<bool(const CellIndex&, double)>& visit);

// Distance from the origin to the entry point of the first Occupied cell.
// Unknown cells are transparent; returns kNoReturn when nothing is hit
// within range_max. Throws if the origin lies outside the grid.
double cast_ray(const OccupancyGrid& grid, const Point2& origin,
                double bearing, double range_max);

// n_beams ray casts evenly spanning [-fov/2, +fov/2] around pose.theta, with
// Gaussian range noise applied to finite returns and clamped to the range
// limits. Deterministic for a fixed seed.
Scan simulate_scan(const OccupancyGrid& grid, const Pose2& pose,
                   const ScanSpec& spec, std::uint64_t rng_seed);

Scan simulate_scan(const OccupancyGrid& grid, const Pose2& pose,
                   const ScanSpec& spec, Rng& rng);

}  // namespace gridgraph

#endif  // GRIDGRAPH_LIDAR_HPP
