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

#ifndef GRIDGRAPH_DISTANCE_FIELD_HPP
#define GRIDGRAPH_DISTANCE_FIELD_HPP

#include <vector>

#include "gridgraph/grid.hpp"

namespace gridgraph {

// Exact Euclidean distance (meters) from every cell to the nearest Occupied
// cell, optionally capped. Row-major like the grid.
std::vector<float> distance_to_occupied(const OccupancyGrid& grid,
                                        double cap_m);

}  // namespace gridgraph

#endif  // GRIDGRAPH_DISTANCE_FIELD_HPP
