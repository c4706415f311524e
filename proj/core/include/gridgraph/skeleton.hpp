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

#ifndef GRIDGRAPH_SKELETON_HPP
#define GRIDGRAPH_SKELETON_HPP

#include "gridgraph/grid.hpp"

namespace gridgraph {

// Thins the Free region to a one-cell-wide medial structure by iterative
// two-subiteration thinning, then removes redundant pixels so that no 2x2
// block remains fully set. The number of 8-connected mask components equals
// the number of 8-connected Free components, so rooms stay interconnected.
CellMask skeletonize(const OccupancyGrid& grid);

// Chebyshev-disk dilation clipped to the Free cells of the parent grid.
CellMask dilate(const OccupancyGrid& grid, const CellMask& mask, int radius);

// True if removing the pixel keeps local foreground 8-connectivity and does
// not open a hole ((8,4) simple point test). Exposed for tests.
bool is_simple_point(const CellMask& mask, int x, int y);

}  // namespace gridgraph

#endif  // GRIDGRAPH_SKELETON_HPP
