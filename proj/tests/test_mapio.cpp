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

#include "gridgraph/map_io.hpp"
#include "gridgraph/random.hpp"

using namespace gridgraph;

namespace {

std::vector<std::uint8_t> make_p5(int w, int h,
                                  const std::vector<std::uint8_t>& pixels) {
  std::string header =
      "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), pixels.begin(), pixels.end());
  return bytes;
}

OccupancyGrid random_grid(Rng& rng, int max_side = 24) {
  const int w = rng.uniform_int(1, max_side);
  const int h = rng.uniform_int(1, max_side);
  OccupancyGrid g(w, h, 0.05, Pose2(rng.uniform(-5, 5), rng.uniform(-5, 5), 0));
  for (auto& c : g.cells()) {
    c = static_cast<CellState>(rng.uniform_int(0, 2));
  }
  return g;
}

}  // namespace

TEST_CASE("pixel classification follows the threshold formula") {
  MapMetadata meta;  // negate=0, thresholds 0.65 / 0.196
  SUBCASE("black pixel is Occupied") {
    const auto grid = load_ogm(make_p5(1, 1, {0}), meta);
    CHECK(grid.at(0, 0) == CellState::Occupied);
  }
  SUBCASE("near-white pixel is Free") {
    const auto grid = load_ogm(make_p5(1, 1, {254}), meta);
    CHECK(grid.at(0, 0) == CellState::Free);
  }
  SUBCASE("gray 205 stays Unknown: p = 50/255 is not below 0.196") {
    const auto grid = load_ogm(make_p5(1, 1, {205}), meta);
    CHECK(grid.at(0, 0) == CellState::Unknown);
  }
  SUBCASE("negate flips the probability") {
    meta.negate = 1;
    const auto grid = load_ogm(make_p5(1, 1, {254}), meta);
    CHECK(grid.at(0, 0) == CellState::Occupied);
  }
}

TEST_CASE("load applies the vertical flip: image row 0 is the map top") {
  MapMetadata meta;
  // 1x2 image: top pixel black, bottom pixel white.
  const auto grid = load_ogm(make_p5(1, 2, {0, 254}), meta);
  CHECK(grid.at(0, 1) == CellState::Occupied);  // top row = high y
  CHECK(grid.at(0, 0) == CellState::Free);
}

TEST_CASE("save encodes 0/254/205 and flips vertically") {
  OccupancyGrid g(2, 2, 0.1, Pose2());
  // Cell rows bottom-up: (0,0)=Occ (1,0)=Free (0,1)=Unknown (1,1)=Free.
  g.set(0, 0, CellState::Occupied);
  g.set(1, 0, CellState::Free);
  g.set(0, 1, CellState::Unknown);
  g.set(1, 1, CellState::Free);
  const auto [bytes, meta] = save_ogm(g);
  // Raster starts after "P5\n2 2\n255\n": image row 0 = cell row 1.
  const std::size_t off = bytes.size() - 4;
  CHECK(bytes[off + 0] == 205);
  CHECK(bytes[off + 1] == 254);
  CHECK(bytes[off + 2] == 0);
  CHECK(bytes[off + 3] == 254);
  CHECK(meta.occupied_thresh == doctest::Approx(0.65));
  CHECK(meta.free_thresh == doctest::Approx(0.196));
}

TEST_CASE("1x1 Free grid round trips through a single 254 pixel") {
  OccupancyGrid g(1, 1, 0.05, Pose2(), CellState::Free);
  const auto [bytes, meta] = save_ogm(g);
  CHECK(bytes.back() == 254);
  const auto loaded = load_ogm(bytes, meta);
  CHECK(loaded.at(0, 0) == CellState::Free);
}

TEST_CASE("load(save(g)) is the identity on random trinary grids") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const OccupancyGrid g = random_grid(rng);
    const auto [bytes, meta] = save_ogm(g);
    const OccupancyGrid back = load_ogm(bytes, meta);
    REQUIRE(back.width() == g.width());
    REQUIRE(back.height() == g.height());
    CHECK(back.cells() == g.cells());
  }
}

TEST_CASE("P2 ASCII raster parses like P5") {
  const std::string text = "P2\n# a comment\n2 1\n255\n0 254\n";
  const std::vector<std::uint8_t> bytes(text.begin(), text.end());
  const auto grid = load_ogm(bytes, MapMetadata{});
  CHECK(grid.at(0, 0) == CellState::Occupied);
  CHECK(grid.at(1, 0) == CellState::Free);
}

TEST_CASE("malformed PGM inputs are rejected") {
  MapMetadata meta;
  SUBCASE("bad magic") {
    const std::string text = "P7\n1 1\n255\nx";
    CHECK_THROWS(load_ogm({text.begin(), text.end()}, meta));
  }
  SUBCASE("maxval != 255") {
    const std::string text = "P2\n1 1\n127\n0\n";
    CHECK_THROWS(load_ogm({text.begin(), text.end()}, meta));
  }
  SUBCASE("pixel count mismatch") {
    CHECK_THROWS(load_ogm(make_p5(2, 2, {0, 0, 0}), meta));
  }
  SUBCASE("inverted thresholds") {
    meta.free_thresh = 0.7;
    CHECK_THROWS(load_ogm(make_p5(1, 1, {0}), meta));
  }
}

namespace {

// 10x10 pair with a closed square wall ring from (2,2) to (7,7).
std::pair<OccupancyGrid, OccupancyGrid> ring_grids(bool gap,
                                                   bool close_gap_in_full) {
  OccupancyGrid structural(10, 10, 0.1, Pose2(), CellState::Free);
  for (int i = 2; i <= 7; ++i) {
    structural.set(i, 2, CellState::Occupied);
    structural.set(i, 7, CellState::Occupied);
    structural.set(2, i, CellState::Occupied);
    structural.set(7, i, CellState::Occupied);
  }
  if (gap) structural.set(4, 2, CellState::Free);  // one-cell door gap
  OccupancyGrid full = structural;
  if (gap && close_gap_in_full) full.set(4, 2, CellState::Occupied);
  return {structural, full};
}

}  // namespace

TEST_CASE("classify: ring interior becomes Free, exterior Unknown") {
  const auto [structural, full] = ring_grids(false, false);
  const OccupancyGrid out = classify_regions(structural, full);
  CHECK(out.at(0, 0) == CellState::Unknown);
  CHECK(out.at(9, 9) == CellState::Unknown);
  CHECK(out.at(4, 4) == CellState::Free);
  CHECK(out.at(2, 2) == CellState::Occupied);
  // Hand count: interior 4x4 region of the 6x6 ring.
  CHECK(out.count(CellState::Free) == 16);
  CHECK(out.count(CellState::Occupied) == structural.count(CellState::Occupied));
}

TEST_CASE("classify: no envelope means everything exterior") {
  const OccupancyGrid empty(8, 6, 0.1, Pose2(), CellState::Free);
  const OccupancyGrid out = classify_regions(empty, empty);
  CHECK(out.count(CellState::Unknown) == out.size());
}

TEST_CASE("classify: a door element in the full grid seals the leak") {
  const auto [structural, full] = ring_grids(true, true);
  const OccupancyGrid out = classify_regions(structural, full);
  // Interior still Free, and the gap cell itself is indoor.
  CHECK(out.at(4, 4) == CellState::Free);
  CHECK(out.at(4, 2) == CellState::Free);
  CHECK(out.at(0, 0) == CellState::Unknown);

  // Without the door the flood leaks inside.
  const auto [s2, f2] = ring_grids(true, false);
  const OccupancyGrid leaked = classify_regions(s2, f2);
  CHECK(leaked.at(4, 4) == CellState::Unknown);
}

TEST_CASE("classify never rewrites Occupied cells") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    OccupancyGrid structural = random_grid(rng, 16);
    OccupancyGrid full = structural;
    // Full adds extra obstacles.
    for (int k = 0; k < 10; ++k) {
      const int x = rng.uniform_int(0, full.width() - 1);
      const int y = rng.uniform_int(0, full.height() - 1);
      full.set(x, y, CellState::Occupied);
    }
    const OccupancyGrid out = classify_regions(structural, full);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (structural.cells()[i] == CellState::Occupied) {
        CHECK(out.cells()[i] == CellState::Occupied);
      }
    }
  }
}

TEST_CASE("classify rejects frame mismatches") {
  const OccupancyGrid a(4, 4, 0.1, Pose2(), CellState::Free);
  const OccupancyGrid b(5, 4, 0.1, Pose2(), CellState::Free);
  CHECK_THROWS(classify_regions(a, b));
}

TEST_CASE("merge precedence: Occupied > Free > Unknown") {
  OccupancyGrid occ(1, 1, 0.1, Pose2(), CellState::Occupied);
  OccupancyGrid fre(1, 1, 0.1, Pose2(), CellState::Free);
  OccupancyGrid unk(1, 1, 0.1, Pose2(), CellState::Unknown);
  CHECK(merge_stories({occ, fre}).at(0, 0) == CellState::Occupied);
  CHECK(merge_stories({unk, fre}).at(0, 0) == CellState::Free);
  CHECK(merge_stories({unk, unk}).at(0, 0) == CellState::Unknown);
}

TEST_CASE("merging three one-room stories unions the rooms") {
  auto story = [](int x0, int y0) {
    OccupancyGrid g(20, 20, 0.1, Pose2(), CellState::Unknown);
    for (int y = y0; y < y0 + 5; ++y) {
      for (int x = x0; x < x0 + 5; ++x) {
        const bool border =
            x == x0 || y == y0 || x == x0 + 4 || y == y0 + 4;
        g.set(x, y, border ? CellState::Occupied : CellState::Free);
      }
    }
    return g;
  };
  const OccupancyGrid merged =
      merge_stories({story(0, 0), story(7, 7), story(14, 14)});
  CHECK(merged.count(CellState::Free) == 3 * 9);
  CHECK(merged.count(CellState::Occupied) == 3 * 16);
}

TEST_CASE("merge is commutative and associative") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    OccupancyGrid a(12, 9, 0.05, Pose2(1, 2, 0));
    OccupancyGrid b = a, c = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
      a.cells()[i] = static_cast<CellState>(rng.uniform_int(0, 2));
      b.cells()[i] = static_cast<CellState>(rng.uniform_int(0, 2));
      c.cells()[i] = static_cast<CellState>(rng.uniform_int(0, 2));
    }
    CHECK(merge_stories({a, b}).cells() == merge_stories({b, a}).cells());
    CHECK(merge_stories({merge_stories({a, b}), c}).cells() ==
          merge_stories({a, merge_stories({b, c})}).cells());
  }
}

TEST_CASE("merge rejects origin mismatches") {
  const OccupancyGrid a(4, 4, 0.1, Pose2(0, 0, 0), CellState::Free);
  const OccupancyGrid b(4, 4, 0.1, Pose2(1, 0, 0), CellState::Free);
  CHECK_THROWS(merge_stories({a, b}));
}

TEST_CASE("metadata YAML round trip and validation") {
  MapMetadata meta;
  meta.image_path = "map.pgm";
  meta.resolution = 0.05;
  meta.origin[0] = -3.5;
  meta.origin[1] = 2.25;
  const std::string path = "/tmp/gridgraph_test_meta.yaml";
  save_metadata_yaml(meta, path);
  const MapMetadata back = load_metadata_yaml(path);
  CHECK(back.image_path == meta.image_path);
  CHECK(back.resolution == doctest::Approx(meta.resolution));
  CHECK(back.origin[0] == doctest::Approx(meta.origin[0]));
  CHECK(back.origin[1] == doctest::Approx(meta.origin[1]));
  CHECK(back.negate == 0);
}

TEST_CASE("world/cell transforms invert each other on every cell") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const OccupancyGrid g(rng.uniform_int(1, 30), rng.uniform_int(1, 30), 0.05,
                          Pose2(rng.uniform(-4, 4), rng.uniform(-4, 4),
                                rng.uniform(-M_PI, M_PI)));
    for (int y = 0; y < g.height(); ++y) {
      for (int x = 0; x < g.width(); ++x) {
        const CellIndex c{x, y};
        CHECK(g.world_to_cell(g.cell_to_world(c)) == c);
      }
    }
  }
}
