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

#ifndef GRIDGRAPH_MAP_IO_HPP
#define GRIDGRAPH_MAP_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include "gridgraph/grid.hpp"

namespace gridgraph {

// map-server style metadata sidecar. origin is [x, y, yaw].
struct MapMetadata {
  std::string image_path;
  double resolution = 0.05;
  double origin[3] = {0.0, 0.0, 0.0};
  int negate = 0;
  double occupied_thresh = 0.65;
  double free_thresh = 0.196;
};

// Parses a P5 (binary) or P2 (ASCII) PGM with maxval 255 and classifies each
// pixel into the trinary states using the metadata thresholds. Image row 0 is
// the top of the map; cell row 0 is the bottom.
OccupancyGrid load_ogm(const std::vector<std::uint8_t>& pgm_bytes,
                       const MapMetadata& meta);

// Inverse of load_ogm with the fixed encoding Occupied=0, Free=254,
// Unknown=205. The returned metadata carries the default thresholds so that
// load_ogm(save_ogm(g)) == g.
std::pair<std::vector<std::uint8_t>, MapMetadata> save_ogm(
    const OccupancyGrid& grid);

// Separates indoor from outdoor: a border-seeded flood fill over the
// non-Occupied cells of `full` marks the exterior. The result keeps
// `structural`'s Occupied cells, sets exterior cells to Unknown and every
// other non-Occupied cell to Free.
OccupancyGrid classify_regions(const OccupancyGrid& structural,
                               const OccupancyGrid& full);

// Cell-wise merge with precedence Occupied > Free > Unknown. All grids must
// share dimensions, resolution and origin.
OccupancyGrid merge_stories(const std::vector<OccupancyGrid>& grids);

MapMetadata load_metadata_yaml(const std::string& yaml_path);
void save_metadata_yaml(const MapMetadata& meta, const std::string& yaml_path);

// PGM + YAML pair on disk. Loading resolves the image path relative to the
// YAML file's directory, saving writes `<prefix>.pgm` and `<prefix>.yaml`.
OccupancyGrid load_map_files(const std::string& yaml_path);
void save_map_files(const OccupancyGrid& grid, const std::string& prefix);

// Debug overlay: base map pixels with mask cells drawn at gray value 128.
std::vector<std::uint8_t> mask_overlay_pgm(const OccupancyGrid& grid,
                                           const CellMask& mask);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path,
                      const std::vector<std::uint8_t>& bytes);

}  // namespace gridgraph

#endif  // GRIDGRAPH_MAP_IO_HPP
