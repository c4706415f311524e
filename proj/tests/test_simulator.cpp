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

#include <cmath>

#include "gridgraph/sequence.hpp"

using namespace gridgraph;

namespace {

// Walled box with interior Free; size in cells.
OccupancyGrid walled_box(int w, int h, double res) {
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

// Step-marching reference: advances in tiny steps until it enters an
// Occupied cell, then reports the crossing distance.
double march_ray(const OccupancyGrid& g, const Point2& origin, double bearing,
                 double range_max, double step) {
  const double dx = std::cos(bearing);
  const double dy = std::sin(bearing);
  for (double t = 0.0; t <= range_max; t += step) {
    const Point2 p{origin.x + t * dx, origin.y + t * dy};
    const CellIndex c = g.world_to_cell(p);
    if (!g.in_bounds(c)) return std::nan("");
    if (g.at(c) == CellState::Occupied) return t;
  }
  return std::nan("");
}

}  // namespace

TEST_CASE("origin inside an Occupied cell returns zero range") {
  OccupancyGrid g(5, 5, 0.1, Pose2(), CellState::Free);
  g.set(2, 2, CellState::Occupied);
  CHECK(cast_ray(g, {0.25, 0.25}, 0.0, 10.0) == doctest::Approx(0.0));
}

TEST_CASE("corridor wall at x=5 from x=2.5 gives exactly 2.5 m") {
  // 10 m corridor at 0.1 m cells, wall column with its face at x = 5.0.
  OccupancyGrid g(110, 10, 0.1, Pose2(), CellState::Free);
  for (int y = 0; y < 10; ++y) g.set(50, y, CellState::Occupied);
  const double r = cast_ray(g, {2.5, 0.5}, 0.0, 20.0);
  CHECK(r == doctest::Approx(2.5).epsilon(1e-9));
  const double oracle = march_ray(g, {2.5, 0.5}, 0.0, 20.0, 1e-4);
  CHECK(r == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("Unknown cells are transparent and give no return") {
  OccupancyGrid g(20, 5, 0.1, Pose2(), CellState::Free);
  for (int x = 10; x < 20; ++x) {
    for (int y = 0; y < 5; ++y) g.set(x, y, CellState::Unknown);
  }
  CHECK_FALSE(is_return(cast_ray(g, {0.15, 0.25}, 0.0, 50.0)));
}

TEST_CASE("out-of-bounds origin is an error") {
  const OccupancyGrid g(5, 5, 0.1, Pose2(), CellState::Free);
  CHECK_THROWS(cast_ray(g, {-1.0, 0.2}, 0.0, 10.0));
}

TEST_CASE("ranges beyond range_max are no-returns") {
  OccupancyGrid g(110, 10, 0.1, Pose2(), CellState::Free);
  for (int y = 0; y < 10; ++y) g.set(100, y, CellState::Occupied);
  CHECK_FALSE(is_return(cast_ray(g, {0.25, 0.5}, 0.0, 5.0)));
  CHECK(is_return(cast_ray(g, {0.25, 0.5}, 0.0, 15.0)));
}

TEST_CASE("cast_ray agrees with a fine marching oracle on random maps") {
  Rng rng(2024);
  const double res = 0.05;
  const double diag = res * std::sqrt(2.0);
  int checked = 0;
  while (checked < 1000) {
    OccupancyGrid g(60, 60, res, Pose2(rng.uniform(-2, 2), rng.uniform(-2, 2), 0),
                    CellState::Free);
    for (int k = 0; k < 90; ++k) {
      g.set(rng.uniform_int(0, 59), rng.uniform_int(0, 59),
            CellState::Occupied);
    }
    for (int ray = 0; ray < 20; ++ray) {
      const Point2 origin = g.cell_to_world(
          {rng.uniform_int(0, 59), rng.uniform_int(0, 59)});
      const CellIndex oc = g.world_to_cell(origin);
      if (g.at(oc) == CellState::Occupied) continue;
      const double bearing = rng.uniform(-M_PI, M_PI);
      const double fast = cast_ray(g, origin, bearing, 4.0);
      double slow = march_ray(g, origin, bearing, 4.0, res / 50.0);
      ++checked;
      const bool disagree =
          (std::isnan(slow) != !is_return(fast)) ||
          (!std::isnan(slow) && is_return(fast) &&
           std::abs(fast - slow) > diag);
      if (disagree) {
        // A coarse march can step over corner slivers thinner than its step;
        // refine before judging.
        slow = march_ray(g, origin, bearing, 4.0, res / 5000.0);
      }
      if (std::isnan(slow)) {
        CHECK_FALSE(is_return(fast));
        continue;
      }
      REQUIRE(is_return(fast));
      CHECK(std::abs(fast - slow) <= diag);
    }
  }
}

TEST_CASE("world-frame translation of the map moves ranges rigidly") {
  OccupancyGrid a = walled_box(40, 30, 0.1);
  OccupancyGrid b(40, 30, 0.1, Pose2(13.7, -2.9, 0.0), CellState::Free);
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 40; ++x) b.set(x, y, a.at(x, y));
  }
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Point2 pa{rng.uniform(0.3, 3.7), rng.uniform(0.3, 2.7)};
    const Point2 pb{pa.x + 13.7, pa.y - 2.9};
    const double bearing = rng.uniform(-M_PI, M_PI);
    const double ra = cast_ray(a, pa, bearing, 8.0);
    const double rb = cast_ray(b, pb, bearing, 8.0);
    if (is_return(ra)) {
      CHECK(rb == doctest::Approx(ra).epsilon(1e-9));
    } else {
      CHECK_FALSE(is_return(rb));
    }
  }
}

TEST_CASE("noise-free scan from a square room center is 4-fold symmetric") {
  const OccupancyGrid g = walled_box(41, 41, 0.1);
  ScanSpec spec;
  spec.fov = 2.0 * M_PI;
  spec.n_beams = 361;  // 1-degree steps, both ends inclusive
  spec.noise_sigma = 0.0;
  const Pose2 center(2.05, 2.05, 0.0);
  const Scan scan = simulate_scan(g, center, spec, 1u);
  for (int i = 0; i < 90; ++i) {
    CHECK(scan.ranges[i] == doctest::Approx(scan.ranges[i + 90]).epsilon(1e-9));
  }
}

TEST_CASE("same seed, same scan; different seed, different noise") {
  const OccupancyGrid g = walled_box(41, 41, 0.1);
  ScanSpec spec;
  spec.noise_sigma = 0.02;
  const Pose2 pose(2.0, 2.0, 0.5);
  const Scan a = simulate_scan(g, pose, spec, 99u);
  const Scan b = simulate_scan(g, pose, spec, 99u);
  const Scan c = simulate_scan(g, pose, spec, 100u);
  CHECK(a.ranges == b.ranges);
  CHECK(a.ranges != c.ranges);
}

TEST_CASE("sample noise sigma lands within 5% of the configured value") {
  OccupancyGrid g(110, 30, 0.1, Pose2(), CellState::Free);
  for (int y = 0; y < 30; ++y) g.set(80, y, CellState::Occupied);
  ScanSpec spec;
  spec.fov = 0.2;
  spec.n_beams = 10000;
  spec.noise_sigma = 0.01;
  spec.range_max = 20.0;
  const Pose2 pose(2.0, 1.5, 0.0);
  ScanSpec clean = spec;
  clean.noise_sigma = 0.0;
  const Scan noisy = simulate_scan(g, pose, spec, 7u);
  const Scan truth = simulate_scan(g, pose, clean, 7u);
  // Residuals against the noise-free scan isolate the injected noise from
  // the per-beam geometric spread.
  double mean = 0.0;
  int n = 0;
  std::vector<double> residuals;
  for (std::size_t b = 0; b < noisy.ranges.size(); ++b) {
    if (!is_return(noisy.ranges[b]) || !is_return(truth.ranges[b])) continue;
    residuals.push_back(noisy.ranges[b] - truth.ranges[b]);
    mean += residuals.back();
    ++n;
  }
  REQUIRE(n > 9000);
  mean /= n;
  double var = 0.0;
  for (const double r : residuals) var += (r - mean) * (r - mean);
  const double sigma = std::sqrt(var / (n - 1));
  CHECK(sigma > 0.0095);
  CHECK(sigma < 0.0105);
}

TEST_CASE("zero odometry noise reproduces the ground truth stream") {
  const OccupancyGrid g = walled_box(60, 40, 0.1);
  WaypointPath path;
  path.waypoints = {Pose2(1.0, 1.0, 0.0), Pose2(3.0, 1.0, 0.0),
                    Pose2(3.0, 2.5, M_PI / 2)};
  ScanSpec spec;
  spec.rate = 10.0;
  spec.noise_sigma = 0.0;
  MotionLimits limits;
  limits.angular = 2.0;  // keep the heading responsive for this test
  const Sequence seq =
      simulate_sequence(g, path, spec, OdomNoise{}, {}, 11u, limits);
  REQUIRE(seq.odometry.size() == seq.ground_truth.size());
  for (std::size_t i = 0; i < seq.odometry.size(); ++i) {
    CHECK(approx_equal(seq.odometry[i].pose, seq.ground_truth[i].pose, 1e-9));
  }
  CHECK(seq.scans.size() == seq.ground_truth.size());
}

TEST_CASE("an agent between robot and wall shortens exactly the hit beams") {
  const OccupancyGrid g = walled_box(60, 40, 0.1);
  Trajectory traj = {{0.0, Pose2(1.0, 2.0, 0.0)}};
  ScanSpec spec;
  spec.noise_sigma = 0.0;
  spec.fov = M_PI;
  spec.n_beams = 181;

  Agent agent;
  agent.path = {{3.0, 2.0}};  // standing still ahead of the robot
  agent.speed = 0.5;
  agent.radius = 0.3;
  agent.loop = false;

  const Sequence without =
      simulate_sequence(g, traj, spec, OdomNoise{}, {}, 3u);
  const Sequence with =
      simulate_sequence(g, traj, spec, OdomNoise{}, {agent}, 3u);
  REQUIRE(without.scans.size() == 1);
  REQUIRE(with.scans.size() == 1);

  int shortened = 0;
  for (int b = 0; b < spec.n_beams; ++b) {
    const double r0 = without.scans[0].ranges[b];
    const double r1 = with.scans[0].ranges[b];
    const double bearing = spec.bearing(b);
    const bool toward_agent = std::abs(bearing) < 0.16;  // atan(0.3/2) margin
    if (toward_agent && is_return(r1)) {
      if (is_return(r1) && (!is_return(r0) || r1 < r0 - 1e-9)) ++shortened;
    } else if (is_return(r0) && is_return(r1)) {
      CHECK(r0 == doctest::Approx(r1).epsilon(1e-12));
    }
  }
  CHECK(shortened > 3);
}

TEST_CASE("agent painting never leaks into the caller's grid") {
  const OccupancyGrid g = walled_box(60, 40, 0.1);
  const OccupancyGrid snapshot = g;
  Trajectory traj = {{0.0, Pose2(1.0, 2.0, 0.0)}, {0.5, Pose2(1.2, 2.0, 0.0)}};
  Agent agent;
  agent.path = {{3.0, 2.0}, {3.0, 3.0}};
  ScanSpec spec;
  (void)simulate_sequence(g, traj, spec, OdomNoise{}, {agent}, 3u);
  CHECK(g.cells() == snapshot.cells());
}

TEST_CASE("odometry drift grows with path length under noise") {
  const OccupancyGrid g = walled_box(120, 40, 0.1);
  // Straight 10 m run.
  Trajectory traj;
  for (int i = 0; i <= 100; ++i) {
    traj.push_back({i * 0.1, Pose2(0.8 + i * 0.1, 2.0, 0.0)});
  }
  ScanSpec spec;
  spec.noise_sigma = 0.0;
  const OdomNoise noise{0.05, 0.05, 0.01, 0.01};
  double err_mid = 0.0, err_end = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Sequence seq = simulate_sequence(g, traj, spec, noise, {}, seed);
    const auto& odo = seq.odometry;
    const auto& gt = seq.ground_truth;
    err_mid += std::hypot(odo[50].pose.x - gt[50].pose.x,
                          odo[50].pose.y - gt[50].pose.y);
    err_end += std::hypot(odo[100].pose.x - gt[100].pose.x,
                          odo[100].pose.y - gt[100].pose.y);
  }
  CHECK(err_end > 0.0);
  CHECK(err_end > err_mid);
}

TEST_CASE("agent path leaving the grid is rejected") {
  const OccupancyGrid g = walled_box(20, 20, 0.1);
  Agent agent;
  agent.path = {{1.0, 1.0}, {50.0, 1.0}};
  Trajectory traj = {{0.0, Pose2(1.0, 1.0, 0.0)}};
  CHECK_THROWS(simulate_sequence(g, traj, ScanSpec{}, OdomNoise{}, {agent}, 1u));
}

TEST_CASE("sequence JSONL round trip preserves all three streams") {
  const OccupancyGrid g = walled_box(40, 30, 0.1);
  Trajectory traj = {{0.0, Pose2(1.0, 1.0, 0.1)},
                     {0.1, Pose2(1.1, 1.0, 0.2)},
                     {0.2, Pose2(1.2, 1.1, 0.3)}};
  ScanSpec spec;
  spec.n_beams = 31;
  spec.range_max = 2.0;  // force some no-returns
  const Sequence seq = simulate_sequence(
      g, traj, spec, OdomNoise{0.01, 0.01, 0.01, 0.01}, {}, 17u);
  const std::string text = sequence_to_jsonl(seq);
  const Sequence back = sequence_from_jsonl(text);
  REQUIRE(back.scans.size() == seq.scans.size());
  REQUIRE(back.ground_truth.size() == seq.ground_truth.size());
  REQUIRE(back.odometry.size() == seq.odometry.size());
  CHECK(back.static_map_id == seq.static_map_id);
  for (std::size_t i = 0; i < seq.scans.size(); ++i) {
    for (std::size_t b = 0; b < seq.scans[i].ranges.size(); ++b) {
      const double r0 = seq.scans[i].ranges[b];
      const double r1 = back.scans[i].ranges[b];
      if (is_return(r0)) {
        CHECK(r0 == r1);
      } else {
        CHECK_FALSE(is_return(r1));
      }
    }
    CHECK(approx_equal(back.ground_truth[i].pose, seq.ground_truth[i].pose,
                       0.0));
    CHECK(approx_equal(back.odometry[i].pose, seq.odometry[i].pose, 0.0));
  }
}

TEST_CASE("TUM trajectory round trips through text") {
  Trajectory traj = {{0.25, Pose2(1.5, -2.25, 0.7)},
                     {0.5, Pose2(2.0, 0.0, -3.0)}};
  const Trajectory back = trajectory_from_tum(trajectory_to_tum(traj));
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].stamp == doctest::Approx(traj[i].stamp));
    CHECK(approx_equal(back[i].pose, traj[i].pose, 1e-8));
  }
}
