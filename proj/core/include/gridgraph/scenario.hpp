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

#ifndef GRIDGRAPH_SCENARIO_HPP
#define GRIDGRAPH_SCENARIO_HPP

#include "gridgraph/building.hpp"
#include "gridgraph/sequence.hpp"

namespace gridgraph {

// One benchmark environment: the structural map the localizers see and the
// cluttered world the simulator drives through.
struct Scenario {
  std::string name;  // "1-1".."3-2"; X-1 without agents, X-2 with agents
  int level = 1;     // 1 empty, 2 reality, 3 disaster
  bool with_agents = false;
  OccupancyGrid base_grid;
  OccupancyGrid world_grid;
  std::vector<Agent> agents;
  WaypointPath trajectory;
  double achieved_clutter_fraction = 0.0;
  // Disaster may remove base obstacles; additions-only generation keeps this
  // empty, and the invariant base-Occupied implies world-Occupied holds.
  std::vector<CellIndex> removed_cells;
};

struct ScenarioParams {
  double clutter_fraction_reality = 0.15;
  double clutter_fraction_disaster = 0.35;
  int blocked_doors = 2;
  int debris_count = 10;
  int agents_normal = 5;
  int agents_disaster = 6;
  double agent_speed = 1.2;          // m/s
  double agent_speed_factor = 1.5;   // disaster speed multiplier
  double agent_radius = 0.25;        // m
  double furniture_min = 0.3;        // m, rectangle side range
  double furniture_max = 1.2;
  double debris_min = 0.2;
  double debris_max = 0.6;
  int trajectory_stride = 8;         // cells between trajectory waypoints
  int trajectory_dilation = 0;       // 0 = drive the skeleton spine itself
};

// The six scenarios {1 empty, 2 reality, 3 disaster} x {without, with
// agents}. Clutter only adds obstacles; trajectories are planned on the
// world grid (the robot drives through reality, not through the model).
std::vector<Scenario> make_scenarios(const OccupancyGrid& base_grid,
                                     const ScenarioParams& params,
                                     std::uint64_t seed);

Scenario make_scenario(const OccupancyGrid& base_grid, int level,
                       bool with_agents, const ScenarioParams& params,
                       std::uint64_t seed);

// Built-in building models used by the benchmarks and tests.
BuildingModel builtin_office_model();
BuildingModel builtin_apartment_model();
BuildingModel builtin_symmetric_model();

// Slices the named built-in model ("office", "apartment", "symmetric") at
// 1.0 m and classifies indoor/outdoor into the final trinary base map.
OccupancyGrid builtin_map(const std::string& name, double resolution = 0.05);

}  // namespace gridgraph

#endif  // GRIDGRAPH_SCENARIO_HPP
