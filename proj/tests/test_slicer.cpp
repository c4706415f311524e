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

#include "gridgraph/building.hpp"
#include "gridgraph/random.hpp"

using namespace gridgraph;

namespace {

BuildingElement box(const std::string& id, ElementClass cls, double x0,
                    double y0, double x1, double y1, double z0, double z1) {
  BuildingElement e;
  e.id = id;
  e.element_class = cls;
  e.footprint = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  e.z_min = z0;
  e.z_max = z1;
  return e;
}

// Point-membership oracle for the rotated prism: rotate the query back and
// test the unrotated prism directly.
bool inside_prism(const BuildingElement& e, const Quaternion& q,
                  const std::array<double, 3>& pivot, double x, double y,
                  double z) {
  const Quaternion inv{q.w, -q.x, -q.y, -q.z};
  const auto p = inv.rotate({x - pivot[0], y - pivot[1], z - pivot[2]});
  const double ux = p[0] + pivot[0];
  const double uy = p[1] + pivot[1];
  const double uz = p[2] + pivot[2];
  if (uz < e.z_min - 1e-12 || uz > e.z_max + 1e-12) return false;
  return point_in_polygon({ux, uy}, e.footprint);
}

}  // namespace

TEST_CASE("axis-aligned wall slices to the hand-counted 40x2 cell band") {
  BuildingModel m;
  m.elements.push_back(box("wall", ElementClass::Wall, 0, 0, 4.0, 0.2, 0, 3));
  const SliceResult r = slice(m, 1.5, 0.1);
  CHECK(r.any_hit);
  CHECK(r.structural.count(CellState::Occupied) == 40 * 2);
  CHECK(r.full.count(CellState::Occupied) == 40 * 2);
}

TEST_CASE("cut plane above the element misses it") {
  BuildingModel m;
  m.elements.push_back(box("wall", ElementClass::Wall, 0, 0, 4.0, 0.2, 0, 3));
  const SliceResult r = slice(m, 5.0, 0.1);
  CHECK_FALSE(r.any_hit);
  CHECK(r.structural.count(CellState::Occupied) == 0);
}

TEST_CASE("slanted slab appears only where the rotated top clears the cut") {
  // Floor slab z in [0, 0.2], rotated 2 degrees about the x axis; at the far
  // y end the top surface rises past the 0.25 m cut plane.
  BuildingModel m;
  m.elements.push_back(box("slab", ElementClass::Slab, 0, 0, 4.0, 3.0, 0, 0.2));
  m.rotation = Quaternion::from_axis_angle(1, 0, 0, 2.0 * M_PI / 180.0);
  const double cut = 0.25;
  const double res = 0.02;
  const SliceResult r = slice(m, cut, res);
  CHECK(r.any_hit);
  CHECK(r.structural.count(CellState::Occupied) > 0);
  // The slab must not cover everything.
  CHECK(r.structural.count(CellState::Occupied) <
        r.structural.size() / 2);

  // 1 mm-step sampling oracle: compare cell states against dense point
  // membership at the cell centers.
  const std::array<double, 3> pivot{2.0, 1.5, 0.1};
  std::size_t mismatches = 0, occupied = 0;
  for (int y = 0; y < r.structural.height(); ++y) {
    for (int x = 0; x < r.structural.width(); ++x) {
      const Point2 c = r.structural.cell_to_world({x, y});
      const bool oracle = inside_prism(m.elements[0], m.rotation, pivot, c.x,
                                       c.y, cut);
      const bool sliced = r.structural.at(x, y) == CellState::Occupied;
      occupied += sliced;
      if (oracle != sliced) ++mismatches;
    }
  }
  // Boundary cells may differ by the epsilon of the hull construction.
  CHECK(mismatches <= occupied / 50 + 4);
  // Occupancy concentrates at the far y end.
  std::size_t low_half = 0, high_half = 0;
  for (int y = 0; y < r.structural.height(); ++y) {
    for (int x = 0; x < r.structural.width(); ++x) {
      if (r.structural.at(x, y) != CellState::Occupied) continue;
      (y < r.structural.height() / 2 ? low_half : high_half) += 1;
    }
  }
  CHECK(high_half > 0);
  CHECK(low_half == 0);
}

TEST_CASE("structural excludes doors, windows, spaces and furniture") {
  BuildingModel m;
  m.elements.push_back(box("wall", ElementClass::Wall, 0, 0, 1, 0.2, 0, 3));
  m.elements.push_back(box("door", ElementClass::Door, 1, 0, 2, 0.2, 0, 2.1));
  m.elements.push_back(box("win", ElementClass::Window, 2, 0, 3, 0.2, 0.8, 2.2));
  m.elements.push_back(box("space", ElementClass::Space, 0, 0.2, 3, 3, 0, 3));
  const SliceResult r = slice(m, 1.0, 0.1);
  CHECK(r.full.count(CellState::Occupied) >
        r.structural.count(CellState::Occupied));
  // Every structural Occupied cell is Occupied in the full grid.
  for (std::size_t i = 0; i < r.structural.size(); ++i) {
    if (r.structural.cells()[i] == CellState::Occupied) {
      CHECK(r.full.cells()[i] == CellState::Occupied);
    }
  }
}

TEST_CASE("structural and full grids always share the frame") {
  BuildingModel m;
  m.elements.push_back(box("wall", ElementClass::Wall, -2, 1, 7, 1.3, 0, 3));
  m.elements.push_back(box("door", ElementClass::Door, 8, 0, 9, 2, 0, 2.1));
  const SliceResult r = slice(m, 1.0, 0.07);
  CHECK(r.structural.same_frame(r.full));
}

TEST_CASE("non-convex footprints are triangulated before slicing") {
  BuildingElement e;
  e.id = "L";
  e.element_class = ElementClass::Wall;
  // L-shaped footprint.
  e.footprint = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  e.z_min = 0;
  e.z_max = 3;
  BuildingModel m;
  m.elements.push_back(e);
  const SliceResult r = slice(m, 1.0, 0.1);
  // Expected area: 3 m^2 = 300 cells at 0.1 m; allow boundary wiggle.
  const auto occ = r.structural.count(CellState::Occupied);
  CHECK(occ > 280);
  CHECK(occ < 330);
  // The notch stays free.
  const CellIndex notch = r.structural.world_to_cell({1.5, 1.5});
  CHECK(r.structural.at(notch) != CellState::Occupied);
}

TEST_CASE("non-simple polygons are rejected") {
  BuildingElement e;
  e.id = "bowtie";
  e.element_class = ElementClass::Wall;
  e.footprint = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  e.z_min = 0;
  e.z_max = 1;
  BuildingModel m;
  m.elements.push_back(e);
  CHECK_THROWS(slice(m, 0.5, 0.1));
}

TEST_CASE("rasterization oracle on random convex prisms") {
  Rng rng(42);
  const double res = 0.05;
  for (int trial = 0; trial < 100; ++trial) {
    // Random convex polygon: hull of random points.
    std::vector<Point2> pts;
    const int n = rng.uniform_int(3, 9);
    for (int i = 0; i < n; ++i) {
      pts.push_back({rng.uniform(0.5, 4.5), rng.uniform(0.5, 3.5)});
    }
    std::vector<Point2> hull = convex_hull(pts);
    if (hull.size() < 3) continue;
    BuildingElement e;
    e.id = "prism";
    e.element_class = ElementClass::Wall;
    e.footprint = hull;
    e.z_min = 0.0;
    e.z_max = rng.uniform(0.5, 3.0);
    BuildingModel m;
    m.elements.push_back(e);
    const double cut = rng.uniform(0.05, e.z_max - 0.05);
    const SliceResult r = slice(m, cut, res);
    REQUIRE(r.any_hit);

    const double diag = res * std::sqrt(2.0);
    for (int y = 0; y < r.structural.height(); ++y) {
      for (int x = 0; x < r.structural.width(); ++x) {
        const Point2 c = r.structural.cell_to_world({x, y});
        const bool occupied = r.structural.at(x, y) == CellState::Occupied;
        if (point_in_polygon(c, hull)) {
          CHECK(occupied);
        } else {
          // Distance from the polygon; only assert when clearly outside.
          double min_d = 1e9;
          for (std::size_t i = 0; i < hull.size(); ++i) {
            const Point2& a = hull[i];
            const Point2& b = hull[(i + 1) % hull.size()];
            const double vx = b.x - a.x, vy = b.y - a.y;
            const double len2 = vx * vx + vy * vy;
            double t = len2 > 0 ? ((c.x - a.x) * vx + (c.y - a.y) * vy) / len2
                                : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            min_d = std::min(min_d, std::hypot(c.x - (a.x + t * vx),
                                               c.y - (a.y + t * vy)));
          }
          if (min_d > diag) CHECK_FALSE(occupied);
        }
      }
    }
  }
}

TEST_CASE("add_reference_frame adds exactly four posts") {
  BuildingModel m;
  m.elements.push_back(box("w", ElementClass::Wall, 0, 0, 5, 0.2, 0, 3));
  m.elements.push_back(box("s", ElementClass::Slab, 0, 0, 5, 4, -0.2, 0));
  const std::size_t before = m.elements.size();
  const BuildingModel out = add_reference_frame(m);
  CHECK(out.elements.size() == before + 4);
  for (std::size_t i = before; i < out.elements.size(); ++i) {
    CHECK(out.elements[i].element_class == ElementClass::Other);
  }
}

TEST_CASE("reference posts give both stories identical slice extents") {
  // Two stories with different footprints.
  BuildingModel m;
  m.elements.push_back(box("w0", ElementClass::Wall, 0, 0, 6, 0.2, 0, 3));
  m.elements.push_back(box("w0b", ElementClass::Wall, 0, 3, 6, 3.2, 0, 3));
  m.elements.push_back(box("w1", ElementClass::Wall, 1, 0.5, 4, 0.7, 3, 6));
  const BuildingModel with_ref = add_reference_frame(m);
  const SliceResult s0 = slice(with_ref, 1.0, 0.1);
  const SliceResult s1 = slice(with_ref, 4.0, 0.1);
  CHECK(s0.structural.same_frame(s1.structural));
  CHECK(s1.any_hit);
}

TEST_CASE("add_reference_frame keeps the extent when applied twice") {
  BuildingModel m;
  m.elements.push_back(box("w", ElementClass::Wall, 0, 0, 5, 0.2, 0, 3));
  const BuildingModel once = add_reference_frame(m);
  const BuildingModel twice = add_reference_frame(once);
  const SliceResult a = slice(once, 1.0, 0.1);
  const SliceResult b = slice(twice, 1.0, 0.1);
  CHECK(a.structural.same_frame(b.structural));
  CHECK(twice.elements.size() == once.elements.size() + 4);
}

TEST_CASE("building JSON round trip") {
  BuildingModel m;
  m.elements.push_back(box("wall", ElementClass::Wall, 0, 0, 4, 0.2, 0, 3));
  m.elements.push_back(box("door", ElementClass::Door, 4, 0, 5, 0.2, 0, 2.1));
  m.rotation = Quaternion::from_axis_angle(0, 0, 1, 0.3);
  const std::string json = building_to_json(m);
  const BuildingModel back = parse_building_json(json);
  REQUIRE(back.elements.size() == m.elements.size());
  CHECK(back.elements[0].id == "wall");
  CHECK(back.elements[1].element_class == ElementClass::Door);
  CHECK(back.rotation.w == doctest::Approx(m.rotation.w));
  CHECK(back.rotation.z == doctest::Approx(m.rotation.z));
}

TEST_CASE("building JSON rejects bad documents") {
  CHECK_THROWS(parse_building_json("{\"schema\": 2, \"elements\": []}"));
  CHECK_THROWS(parse_building_json(
      "{\"schema\": 1, \"rotation\": [2,0,0,0], \"elements\": []}"));
  CHECK_THROWS(parse_building_json(
      "{\"schema\": 1, \"elements\": [{\"id\":\"x\",\"class\":\"Wall\","
      "\"footprint\":[[0,0],[1,0]],\"z_min\":0,\"z_max\":1}]}"));
}
