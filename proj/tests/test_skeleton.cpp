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

#include "gridgraph/random.hpp"
#include "gridgraph/skeleton.hpp"

using namespace gridgraph;

namespace {

int free_components(const OccupancyGrid& g) {
  return count_components8(g.width(), g.height(), [&](int x, int y) {
    return g.at(x, y) == CellState::Free;
  });
}

int mask_components(const CellMask& m) {
  return count_components8(m.width, m.height,
                           [&](int x, int y) { return m.at(x, y); });
}

bool has_full_2x2_block(const CellMask& m) {
  for (int y = 0; y + 1 < m.height; ++y) {
    for (int x = 0; x + 1 < m.width; ++x) {
      if (m.at(x, y) && m.at(x + 1, y) && m.at(x, y + 1) &&
          m.at(x + 1, y + 1)) {
        return true;
      }
    }
  }
  return false;
}

bool subset_of_free(const CellMask& m, const OccupancyGrid& g) {
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (m.at(x, y) && g.at(x, y) != CellState::Free) return false;
    }
  }
  return true;
}

// Random multi-room map: Unknown border, Free rooms connected by random
// corridors carved into an Occupied interior.
OccupancyGrid random_rooms(Rng& rng, int size = 40) {
  OccupancyGrid g(size, size, 0.05, Pose2(), CellState::Occupied);
  const int rooms = rng.uniform_int(2, 5);
  std::vector<CellIndex> centers;
  for (int r = 0; r < rooms; ++r) {
    const int w = rng.uniform_int(5, 12);
    const int h = rng.uniform_int(5, 12);
    const int x0 = rng.uniform_int(1, size - w - 2);
    const int y0 = rng.uniform_int(1, size - h - 2);
    for (int y = y0; y < y0 + h; ++y) {
      for (int x = x0; x < x0 + w; ++x) {
        g.set(x, y, CellState::Free);
      }
    }
    centers.push_back({x0 + w / 2, y0 + h / 2});
  }
  // Some corridors; they may or may not merge rooms.
  for (std::size_t i = 1; i < centers.size(); ++i) {
    if (rng.uniform() < 0.5) continue;
    CellIndex a = centers[i - 1];
    const CellIndex b = centers[i];
    while (a.x != b.x) {
      g.set(a.x, a.y, CellState::Free);
      a.x += a.x < b.x ? 1 : -1;
    }
    while (a.y != b.y) {
      g.set(a.x, a.y, CellState::Free);
      a.y += a.y < b.y ? 1 : -1;
    }
  }
  return g;
}

}  // namespace

TEST_CASE("3x3 all-Free grid thins to the single center cell") {
  const OccupancyGrid g(3, 3, 0.1, Pose2(), CellState::Free);
  const CellMask skel = skeletonize(g);
  CHECK(skel.count() == 1);
  CHECK(skel.at(1, 1));
}

TEST_CASE("a 1xN corridor is already its own skeleton") {
  OccupancyGrid g(7, 1, 0.1, Pose2(), CellState::Free);
  const CellMask skel = skeletonize(g);
  CHECK(skel.count() == 7);
  for (int x = 0; x < 7; ++x) CHECK(skel.at(x, 0));
}

TEST_CASE("two rooms split by a wall give a two-component skeleton") {
  OccupancyGrid g(20, 20, 0.1, Pose2(), CellState::Free);
  for (int y = 0; y < 20; ++y) g.set(10, y, CellState::Occupied);
  REQUIRE(free_components(g) == 2);
  const CellMask skel = skeletonize(g);
  CHECK(mask_components(skel) == 2);
}

TEST_CASE("no Free cells gives an empty mask") {
  const OccupancyGrid g(5, 5, 0.1, Pose2(), CellState::Occupied);
  CHECK(skeletonize(g).count() == 0);
}

TEST_CASE("skeleton invariants on random multi-room maps") {
  Rng rng(1234);
  for (int trial = 0; trial < 60; ++trial) {
    const OccupancyGrid g = random_rooms(rng);
    const CellMask skel = skeletonize(g);
    CAPTURE(trial);
    CHECK(mask_components(skel) == free_components(g));
    CHECK_FALSE(has_full_2x2_block(skel));
    CHECK(subset_of_free(skel, g));
  }
}

TEST_CASE("dilate with radius 0 is the identity") {
  OccupancyGrid g(9, 9, 0.1, Pose2(), CellState::Free);
  CellMask m(9, 9);
  m.set(4, 4);
  m.set(2, 7);
  const CellMask out = dilate(g, m, 0);
  CHECK(out.bits == m.bits);
}

TEST_CASE("dilating one bit by 1 on an open grid yields a 3x3 block") {
  OccupancyGrid g(9, 9, 0.1, Pose2(), CellState::Free);
  CellMask m(9, 9);
  m.set(4, 4);
  const CellMask out = dilate(g, m, 1);
  CHECK(out.count() == 9);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      CHECK(out.at(4 + dx, 4 + dy));
    }
  }
}

TEST_CASE("dilation never expands into an Occupied cell") {
  OccupancyGrid g(5, 5, 0.1, Pose2(), CellState::Free);
  g.set(3, 2, CellState::Occupied);
  CellMask m(5, 5);
  m.set(2, 2);
  const CellMask out = dilate(g, m, 1);
  CHECK(out.count() == 8);  // 3x3 minus the blocked cell
  CHECK_FALSE(out.at(3, 2));
}

TEST_CASE("dilate is monotone in the radius") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const OccupancyGrid g = random_rooms(rng, 30);
    const CellMask skel = skeletonize(g);
    CellMask prev = skel;
    for (int r = 0; r <= 3; ++r) {
      const CellMask cur = dilate(g, skel, r);
      for (std::size_t i = 0; i < cur.bits.size(); ++i) {
        if (prev.bits[i]) CHECK(cur.bits[i]);
      }
      prev = cur;
    }
  }
}

TEST_CASE("simple point test matches hand-checked neighborhoods") {
  CellMask m(3, 3);
  // Straight horizontal line: the middle is not simple.
  m.set(0, 1);
  m.set(1, 1);
  m.set(2, 1);
  CHECK_FALSE(is_simple_point(m, 1, 1));
  // End of the line is simple.
  CHECK(is_simple_point(m, 0, 1));
  // Isolated pixel is not (no neighbors).
  CellMask iso(3, 3);
  iso.set(1, 1);
  CHECK_FALSE(is_simple_point(iso, 1, 1));
}
