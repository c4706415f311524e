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

#include "gridgraph/building.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gridgraph {

namespace {

using Vec3 = std::array<double, 3>;

constexpr double kPostSide = 0.05;  // meters; one cell at default resolution

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Point2& p, const Point2& a, const Point2& b,
                double eps) {
  if (std::abs(cross(a, b, p)) > eps) return false;
  return p.x >= std::min(a.x, b.x) - eps && p.x <= std::max(a.x, b.x) + eps &&
         p.y >= std::min(a.y, b.y) - eps && p.y <= std::max(a.y, b.y) + eps;
}

// Proper or touching intersection of open segments, endpoints excluded.
bool segments_cross(const Point2& a, const Point2& b, const Point2& c,
                    const Point2& d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return false;
}

struct Aabb3 {
  Vec3 lo{std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi{-std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};

  void grow(const Vec3& p) {
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  bool valid() const { return lo[0] <= hi[0]; }
};

Aabb3 model_bounds(const BuildingModel& model) {
  Aabb3 box;
  for (const auto& e : model.elements) {
    for (const auto& v : e.footprint) {
      box.grow({v.x, v.y, e.z_min});
      box.grow({v.x, v.y, e.z_max});
    }
  }
  return box;
}

void validate_element(const BuildingElement& e) {
  if (e.footprint.size() < 3) {
    throw std::runtime_error("building element '" + e.id +
                             "': footprint needs >= 3 vertices");
  }
  if (!(e.z_min < e.z_max)) {
    throw std::runtime_error("building element '" + e.id +
                             "': z_min must be < z_max");
  }
  if (!polygon_is_simple(e.footprint)) {
    throw std::runtime_error("building element '" + e.id +
                             "': non-simple polygon");
  }
}

// Rasterizes one convex polygon: any cell whose center is inside (boundary
// counts) becomes Occupied.
void rasterize_polygon(const std::vector<Point2>& poly, OccupancyGrid& grid) {
  if (poly.size() < 3) return;
  double min_x = poly[0].x, max_x = poly[0].x;
  double min_y = poly[0].y, max_y = poly[0].y;
  for (const auto& p : poly) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const CellIndex lo = grid.world_to_cell({min_x, min_y});
  const CellIndex hi = grid.world_to_cell({max_x, max_y});
  for (int y = std::max(0, lo.y - 1); y <= std::min(grid.height() - 1, hi.y + 1); ++y) {
    for (int x = std::max(0, lo.x - 1); x <= std::min(grid.width() - 1, hi.x + 1); ++x) {
      if (point_in_polygon(grid.cell_to_world({x, y}), poly)) {
        grid.set(x, y, CellState::Occupied);
      }
    }
  }
}

}  // namespace

const char* to_string(ElementClass c) {
  switch (c) {
    case ElementClass::Wall: return "Wall";
    case ElementClass::Column: return "Column";
    case ElementClass::Slab: return "Slab";
    case ElementClass::Stair: return "Stair";
    case ElementClass::Door: return "Door";
    case ElementClass::Window: return "Window";
    case ElementClass::Space: return "Space";
    case ElementClass::Furniture: return "Furniture";
    case ElementClass::Other: return "Other";
  }
  return "Other";
}

ElementClass element_class_from_string(const std::string& s) {
  static const std::pair<const char*, ElementClass> table[] = {
      {"Wall", ElementClass::Wall},         {"Column", ElementClass::Column},
      {"Slab", ElementClass::Slab},         {"Stair", ElementClass::Stair},
      {"Door", ElementClass::Door},         {"Window", ElementClass::Window},
      {"Space", ElementClass::Space},       {"Furniture", ElementClass::Furniture},
      {"Other", ElementClass::Other},
  };
  for (const auto& [name, cls] : table) {
    if (s == name) return cls;
  }
  throw std::runtime_error("unknown element class '" + s + "'");
}

bool is_structural(ElementClass c) {
  switch (c) {
    case ElementClass::Wall:
    case ElementClass::Column:
    case ElementClass::Slab:
    case ElementClass::Stair:
    case ElementClass::Other:
      return true;
    default:
      return false;
  }
}

double Quaternion::norm() const {
  return std::sqrt(w * w + x * x + y * y + z * z);
}

std::array<double, 3> Quaternion::rotate(const std::array<double, 3>& v) const {
  // v' = v + 2*q_v x (q_v x v + w*v)
  const double tx = 2.0 * (y * v[2] - z * v[1]);
  const double ty = 2.0 * (z * v[0] - x * v[2]);
  const double tz = 2.0 * (x * v[1] - y * v[0]);
  return {v[0] + w * tx + (y * tz - z * ty),
          v[1] + w * ty + (z * tx - x * tz),
          v[2] + w * tz + (x * ty - y * tx)};
}

Quaternion Quaternion::from_axis_angle(double ax, double ay, double az,
                                       double angle) {
  const double n = std::sqrt(ax * ax + ay * ay + az * az);
  if (n == 0.0) return {};
  const double s = std::sin(angle / 2.0) / n;
  return {std::cos(angle / 2.0), ax * s, ay * s, az * s};
}

bool polygon_is_simple(const std::vector<Point2>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip edges sharing a vertex.
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_cross(a, b, poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool polygon_is_convex(const std::vector<Point2>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c =
        cross(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]);
    if (std::abs(c) < 1e-12) continue;
    const int s = c > 0 ? 1 : -1;
    if (sign == 0) {
      sign = s;
    } else if (s != sign) {
      return false;
    }
  }
  return true;
}

bool point_in_polygon(const Point2& p, const std::vector<Point2>& poly) {
  const std::size_t n = poly.size();
  constexpr double kEps = 1e-9;
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(p, poly[i], poly[(i + 1) % n], kEps)) return true;
  }
  // Ray crossing count to the +x side.
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_int = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_int) inside = !inside;
    }
  }
  return inside;
}

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& a, const Point2& b) {
                          return std::abs(a.x - b.x) < 1e-12 &&
                                 std::abs(a.y - b.y) < 1e-12;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Point2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-15) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 1e-15) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

std::vector<std::array<Point2, 3>> triangulate(
    const std::vector<Point2>& poly) {
  std::vector<Point2> pts = poly;
  // Ear clipping expects counter-clockwise orientation.
  double area2 = 0.0;
  for (std::size_t i = 0, j = pts.size() - 1; i < pts.size(); j = i++) {
    area2 += pts[j].x * pts[i].y - pts[i].x * pts[j].y;
  }
  if (area2 < 0) std::reverse(pts.begin(), pts.end());

  std::vector<std::array<Point2, 3>> tris;
  std::vector<std::size_t> idx(pts.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

  auto is_ear = [&](std::size_t i) {
    const std::size_t n = idx.size();
    const Point2& a = pts[idx[(i + n - 1) % n]];
    const Point2& b = pts[idx[i]];
    const Point2& c = pts[idx[(i + 1) % n]];
    if (cross(a, b, c) <= 1e-15) return false;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == (i + n - 1) % n || k == i || k == (i + 1) % n) continue;
      const Point2& p = pts[idx[k]];
      if (cross(a, b, p) >= -1e-15 && cross(b, c, p) >= -1e-15 &&
          cross(c, a, p) >= -1e-15) {
        return false;
      }
    }
    return true;
  };

  std::size_t guard = 0;
  while (idx.size() > 3 && guard < 10000) {
    bool clipped = false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (is_ear(i)) {
        const std::size_t n = idx.size();
        tris.push_back({pts[idx[(i + n - 1) % n]], pts[idx[i]],
                        pts[idx[(i + 1) % n]]});
        idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
        clipped = true;
        break;
      }
    }
    if (!clipped) break;  // degenerate remainder
    ++guard;
  }
  if (idx.size() == 3) {
    tris.push_back({pts[idx[0]], pts[idx[1]], pts[idx[2]]});
  }
  return tris;
}

std::vector<std::vector<Point2>> prism_cross_section(
    const BuildingElement& element, const Quaternion& rotation,
    const std::array<double, 3>& pivot, double cut_height) {
  std::vector<std::vector<Point2>> sections;

  auto slice_convex = [&](const std::vector<Point2>& footprint) {
    const std::size_t n = footprint.size();
    std::vector<Vec3> bottom(n), top(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 b{footprint[i].x - pivot[0], footprint[i].y - pivot[1],
                   element.z_min - pivot[2]};
      const Vec3 t{footprint[i].x - pivot[0], footprint[i].y - pivot[1],
                   element.z_max - pivot[2]};
      const Vec3 rb = rotation.rotate(b);
      const Vec3 rt = rotation.rotate(t);
      bottom[i] = {rb[0] + pivot[0], rb[1] + pivot[1], rb[2] + pivot[2]};
      top[i] = {rt[0] + pivot[0], rt[1] + pivot[1], rt[2] + pivot[2]};
    }

    std::vector<Point2> hits;
    auto clip_edge = [&](const Vec3& a, const Vec3& b) {
      const double da = a[2] - cut_height;
      const double db = b[2] - cut_height;
      if (std::abs(da) < 1e-12) hits.push_back({a[0], a[1]});
      if (std::abs(db) < 1e-12) hits.push_back({b[0], b[1]});
      if ((da > 0 && db < 0) || (da < 0 && db > 0)) {
        const double t = da / (da - db);
        hits.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
      }
    };
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      clip_edge(bottom[i], bottom[j]);
      clip_edge(top[i], top[j]);
      clip_edge(bottom[i], top[i]);
    }
    if (hits.size() < 3) return;
    std::vector<Point2> hull = convex_hull(std::move(hits));
    if (hull.size() >= 3) sections.push_back(std::move(hull));
  };

  if (polygon_is_convex(element.footprint)) {
    slice_convex(element.footprint);
  } else {
    for (const auto& tri : triangulate(element.footprint)) {
      slice_convex({tri[0], tri[1], tri[2]});
    }
  }
  return sections;
}

SliceResult slice(const BuildingModel& model, double cut_height,
                  double resolution) {
  if (model.elements.empty()) {
    throw std::runtime_error("slice: empty building model");
  }
  if (resolution <= 0.0) {
    throw std::runtime_error("slice: non-positive resolution");
  }
  if (std::abs(model.rotation.norm() - 1.0) > 1e-9) {
    throw std::runtime_error("slice: rotation quaternion is not unit length");
  }
  for (const auto& e : model.elements) validate_element(e);

  const Aabb3 bounds = model_bounds(model);
  const Vec3 pivot{(bounds.lo[0] + bounds.hi[0]) / 2.0,
                   (bounds.lo[1] + bounds.hi[1]) / 2.0,
                   (bounds.lo[2] + bounds.hi[2]) / 2.0};

  // Extent covers the whole rotated model so every story slice of the same
  // model shares the grid frame.
  Aabb3 rotated;
  for (const auto& e : model.elements) {
    for (const auto& v : e.footprint) {
      for (const double z : {e.z_min, e.z_max}) {
        const Vec3 r = model.rotation.rotate(
            {v.x - pivot[0], v.y - pivot[1], z - pivot[2]});
        rotated.grow({r[0] + pivot[0], r[1] + pivot[1], r[2] + pivot[2]});
      }
    }
  }

  const double pad = resolution;
  const double min_x = rotated.lo[0] - pad;
  const double min_y = rotated.lo[1] - pad;
  const int width = static_cast<int>(
      std::ceil((rotated.hi[0] - rotated.lo[0]) / resolution)) + 2;
  const int height = static_cast<int>(
      std::ceil((rotated.hi[1] - rotated.lo[1]) / resolution)) + 2;

  SliceResult result{
      OccupancyGrid(width, height, resolution, Pose2(min_x, min_y, 0.0),
                    CellState::Free),
      OccupancyGrid(width, height, resolution, Pose2(min_x, min_y, 0.0),
                    CellState::Free),
      false};

  for (const auto& e : model.elements) {
    const auto sections =
        prism_cross_section(e, model.rotation, pivot, cut_height);
    if (sections.empty()) continue;
    result.any_hit = true;
    for (const auto& poly : sections) {
      rasterize_polygon(poly, result.full);
      if (is_structural(e.element_class)) {
        rasterize_polygon(poly, result.structural);
      }
    }
  }
  return result;
}

BuildingModel add_reference_frame(const BuildingModel& model) {
  if (model.elements.empty()) {
    throw std::runtime_error("add_reference_frame: empty building model");
  }
  const Aabb3 bounds = model_bounds(model);
  BuildingModel out = model;
  // Posts sit just inside the corners so the bounding box (and with it the
  // slice extent) does not change when applied repeatedly.
  const double x0 = bounds.lo[0];
  const double y0 = bounds.lo[1];
  const double x1 = bounds.hi[0];
  const double y1 = bounds.hi[1];
  const double s = std::min({kPostSide, (x1 - x0) / 4.0, (y1 - y0) / 4.0});
  const std::array<std::array<double, 4>, 4> corners = {{
      {x0, y0, x0 + s, y0 + s},
      {x1 - s, y0, x1, y0 + s},
      {x1 - s, y1 - s, x1, y1},
      {x0, y1 - s, x0 + s, y1},
  }};
  int n = 0;
  for (const auto& c : corners) {
    BuildingElement post;
    post.id = "ref_post_" + std::to_string(n++);
    post.element_class = ElementClass::Other;
    post.footprint = {{c[0], c[1]}, {c[2], c[1]}, {c[2], c[3]}, {c[0], c[3]}};
    post.z_min = bounds.lo[2];
    post.z_max = bounds.hi[2];
    out.elements.push_back(std::move(post));
  }
  return out;
}

BuildingModel parse_building_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("building json: " + std::string(e.what()));
  }
  if (!doc.contains("schema") || doc["schema"].get<int>() != 1) {
    throw std::runtime_error("building json: unsupported schema version");
  }
  BuildingModel model;
  if (doc.contains("rotation")) {
    const auto& r = doc["rotation"];
    if (!r.is_array() || r.size() != 4) {
      throw std::runtime_error("building json: rotation must be [w,x,y,z]");
    }
    model.rotation = {r[0].get<double>(), r[1].get<double>(),
                      r[2].get<double>(), r[3].get<double>()};
    if (std::abs(model.rotation.norm() - 1.0) > 1e-9) {
      throw std::runtime_error("building json: rotation must be unit length");
    }
  }
  for (const auto& je : doc.at("elements")) {
    BuildingElement e;
    e.id = je.at("id").get<std::string>();
    e.element_class = element_class_from_string(je.at("class").get<std::string>());
    for (const auto& v : je.at("footprint")) {
      e.footprint.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    }
    e.z_min = je.at("z_min").get<double>();
    e.z_max = je.at("z_max").get<double>();
    validate_element(e);
    model.elements.push_back(std::move(e));
  }
  return model;
}

BuildingModel load_building_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_building_json(ss.str());
}

std::string building_to_json(const BuildingModel& model) {
  nlohmann::json doc;
  doc["schema"] = 1;
  doc["rotation"] = {model.rotation.w, model.rotation.x, model.rotation.y,
                     model.rotation.z};
  doc["elements"] = nlohmann::json::array();
  for (const auto& e : model.elements) {
    nlohmann::json je;
    je["id"] = e.id;
    je["class"] = to_string(e.element_class);
    je["footprint"] = nlohmann::json::array();
    for (const auto& v : e.footprint) {
      je["footprint"].push_back({v.x, v.y});
    }
    je["z_min"] = e.z_min;
    je["z_max"] = e.z_max;
    doc["elements"].push_back(std::move(je));
  }
  return doc.dump(2);
}

}  // namespace gridgraph
