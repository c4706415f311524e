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

#ifndef GRIDGRAPH_BUILDING_HPP
#define GRIDGRAPH_BUILDING_HPP

#include <array>
#include <string>
#include <vector>

#include "gridgraph/grid.hpp"

namespace gridgraph {

enum class ElementClass {
  Wall,
  Column,
  Slab,
  Stair,
  Door,
  Window,
  Space,
  Furniture,
  Other,
};

const char* to_string(ElementClass c);
ElementClass element_class_from_string(const std::string& s);

// Structural classes contribute to the navigation map; the remaining classes
// only close the envelope in the full-entity map.
bool is_structural(ElementClass c);

// Vertical prism: a simple polygon footprint extruded over [z_min, z_max].
struct BuildingElement {
  std::string id;
  ElementClass element_class = ElementClass::Other;
  std::vector<Point2> footprint;
  double z_min = 0.0;
  double z_max = 0.0;
};

// Unit quaternion (w, x, y, z).
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  std::array<double, 3> rotate(const std::array<double, 3>& v) const;
  static Quaternion from_axis_angle(double ax, double ay, double az,
                                    double angle);
};

struct BuildingModel {
  std::vector<BuildingElement> elements;
  // Applied to all geometry about the centroid of the model's bounding box
  // before slicing.
  Quaternion rotation;
};

struct SliceResult {
  OccupancyGrid structural;
  OccupancyGrid full;
  // False when the cut plane missed every element.
  bool any_hit = false;
};

// Cuts the rotated model with the plane z = cut_height and rasterizes the
// cross-sections. Both grids share the extent of the whole rotated model
// padded by one cell. A cell is Occupied iff its center lies inside a
// cross-section polygon (boundary inclusive).
SliceResult slice(const BuildingModel& model, double cut_height,
                  double resolution);

// Adds four corner posts spanning the model's full height so that every
// story slice gets the same extent and origin.
BuildingModel add_reference_frame(const BuildingModel& model);

BuildingModel load_building_json(const std::string& path);
BuildingModel parse_building_json(const std::string& text);
std::string building_to_json(const BuildingModel& model);

// Geometry helpers shared with the slicer tests.
bool polygon_is_simple(const std::vector<Point2>& poly);
bool polygon_is_convex(const std::vector<Point2>& poly);
bool point_in_polygon(const Point2& p, const std::vector<Point2>& poly);
std::vector<Point2> convex_hull(std::vector<Point2> points);
std::vector<std::array<Point2, 3>> triangulate(
    const std::vector<Point2>& poly);

// Exact cross-section of the rotated prism with the plane z = cut_height.
// Returns zero or more convex polygons (one per triangle for non-convex
// footprints).
std::vector<std::vector<Point2>> prism_cross_section(
    const BuildingElement& element, const Quaternion& rotation,
    const std::array<double, 3>& pivot, double cut_height);

}  // namespace gridgraph

#endif  // GRIDGRAPH_BUILDING_HPP
