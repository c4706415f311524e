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

#include "gridgraph/scenario.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "gridgraph/coverage.hpp"
#include "gridgraph/distance_field.hpp"
#include "gridgraph/map_io.hpp"
#include "gridgraph/skeleton.hpp"

namespace gridgraph {

namespace {

void add_box(BuildingModel& model, const std::string& id, ElementClass cls,
             double x0, double y0, double x1, double y1, double z0,
             double z1) {
  BuildingElement e;
  e.id = id;
  e.element_class = cls;
  e.footprint = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  e.z_min = z0;
  e.z_max = z1;
  model.elements.push_back(std::move(e));
}

int count_free_components(const OccupancyGrid& grid) {
  return count_components8(grid.width(), grid.height(), [&](int x, int y) {
    return grid.at(x, y) == CellState::Free;
  });
}

std::vector<CellIndex> free_cells_of(const OccupancyGrid& grid) {
  std::vector<CellIndex> cells;
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      if (grid.at(x, y) == CellState::Free) cells.push_back({x, y});
    }
  }
  return cells;
}

// Largest 8-connected component of a mask.
CellMask largest_component(const CellMask& mask) {
  std::vector<int> labels(mask.bits.size(), -1);
  std::vector<std::size_t> sizes;
  std::vector<CellIndex> stack;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * mask.width + x;
      if (!mask.bits[idx] || labels[idx] >= 0) continue;
      const int label = static_cast<int>(sizes.size());
      sizes.push_back(0);
      labels[idx] = label;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const CellIndex c = stack.back();
        stack.pop_back();
        ++sizes[label];
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = c.x + dx;
            const int ny = c.y + dy;
            if ((dx == 0 && dy == 0) || !mask.in_bounds(nx, ny)) continue;
            const std::size_t nidx =
                static_cast<std::size_t>(ny) * mask.width + nx;
            if (!mask.bits[nidx] || labels[nidx] >= 0) continue;
            labels[nidx] = label;
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }
  CellMask out(mask.width, mask.height, mask.parent_grid_id);
  if (sizes.empty()) return out;
  const int best = static_cast<int>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out.bits[i] = labels[i] == best ? 1 : 0;
  }
  return out;
}

// 8-connected BFS shortest path between two Free cells of the grid.
std::vector<CellIndex> bfs_path(const OccupancyGrid& grid,
                                const CellIndex& from, const CellIndex& to) {
  const int w = grid.width();
  const int h = grid.height();
  std::vector<int> prev(static_cast<std::size_t>(w) * h, -2);
  auto idx = [w](const CellIndex& c) {
    return static_cast<std::size_t>(c.y) * w + c.x;
  };
  std::deque<CellIndex> queue;
  prev[idx(from)] = -1;
  queue.push_back(from);
  bool found = false;
  while (!queue.empty() && !found) {
    const CellIndex c = queue.front();
    queue.pop_front();
    for (int dy = -1; dy <= 1 && !found; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const CellIndex n{c.x + dx, c.y + dy};
        if (!grid.in_bounds(n) || grid.at(n) != CellState::Free) continue;
        if (prev[idx(n)] != -2) continue;
        prev[idx(n)] = static_cast<int>(idx(c));
        if (n == to) {
          found = true;
          break;
        }
        queue.push_back(n);
      }
    }
  }
  std::vector<CellIndex> path;
  if (!found) return path;
  int cur = static_cast<int>(idx(to));
  while (cur >= 0) {
    path.push_back({cur % w, cur / w});
    cur = prev[cur];
  }
  std::reverse(path.begin(), path.end());
  return path;
}

struct RectPlacement {
  int x0, y0, x1, y1;  // inclusive cell bounds
};

bool try_place_rect(OccupancyGrid& world, const RectPlacement& r) {
  if (r.x0 < 0 || r.y0 < 0 || r.x1 >= world.width() || r.y1 >= world.height()) {
    return false;
  }
  for (int y = r.y0; y <= r.y1; ++y) {
    for (int x = r.x0; x <= r.x1; ++x) {
      if (world.at(x, y) != CellState::Free) return false;
    }
  }
  for (int y = r.y0; y <= r.y1; ++y) {
    for (int x = r.x0; x <= r.x1; ++x) {
      world.set(x, y, CellState::Occupied);
    }
  }
  return true;
}

void undo_rect(OccupancyGrid& world, const RectPlacement& r) {
  for (int y = r.y0; y <= r.y1; ++y) {
    for (int x = r.x0; x <= r.x1; ++x) {
      world.set(x, y, CellState::Free);
    }
  }
}

// Adds axis-aligned rectangles until `target_cells` Free cells have been
// converted, anchored on wall-adjacent cells when `anchors` is non-empty.
// Placements that would split the Free region are rolled back.
std::size_t place_clutter(OccupancyGrid& world,
                          const std::vector<CellIndex>& anchors,
                          std::size_t target_cells, double min_side,
                          double max_side, int base_components, Rng& rng) {
  if (anchors.empty() || target_cells == 0) return 0;
  const double res = world.resolution();
  std::size_t placed = 0;
  int attempts = 0;
  const int max_attempts = 20000;
  while (placed < target_cells && attempts < max_attempts) {
    ++attempts;
    const CellIndex anchor =
        anchors[rng.uniform_int(0, static_cast<int>(anchors.size()) - 1)];
    const int w_cells = std::max(
        1, static_cast<int>(std::lround(rng.uniform(min_side, max_side) / res)));
    const int h_cells = std::max(
        1, static_cast<int>(std::lround(rng.uniform(min_side, max_side) / res)));
    const int off_x = rng.uniform_int(0, w_cells - 1);
    const int off_y = rng.uniform_int(0, h_cells - 1);
    const RectPlacement rect{anchor.x - off_x, anchor.y - off_y,
                             anchor.x - off_x + w_cells - 1,
                             anchor.y - off_y + h_cells - 1};
    if (!try_place_rect(world, rect)) continue;
    if (count_free_components(world) != base_components) {
      undo_rect(world, rect);
      continue;
    }
    placed += static_cast<std::size_t>(w_cells) * h_cells;
  }
  return placed;
}

// Narrow-passage detection: skeleton cells with small wall clearance,
// clustered so each doorway is reported once.
std::vector<CellIndex> detect_door_cells(const OccupancyGrid& grid,
                                         double max_clearance_m) {
  const CellMask skel = skeletonize(grid);
  const std::vector<float> clearance = distance_to_occupied(grid, 1e6);
  std::vector<CellIndex> narrow;
  for (int y = 0; y < skel.height; ++y) {
    for (int x = 0; x < skel.width; ++x) {
      if (!skel.at(x, y)) continue;
      if (clearance[static_cast<std::size_t>(y) * grid.width() + x] <=
          max_clearance_m) {
        narrow.push_back({x, y});
      }
    }
  }
  // Greedy clustering: keep the lowest-clearance representative of every
  // group of nearby narrow cells.
  std::sort(narrow.begin(), narrow.end(), [&](const CellIndex& a,
                                              const CellIndex& b) {
    const float ca = clearance[static_cast<std::size_t>(a.y) * grid.width() + a.x];
    const float cb = clearance[static_cast<std::size_t>(b.y) * grid.width() + b.x];
    if (ca != cb) return ca < cb;
    return std::make_pair(a.y, a.x) < std::make_pair(b.y, b.x);
  });
  const double min_sep = 1.2 / grid.resolution();  // cells
  std::vector<CellIndex> doors;
  for (const CellIndex& c : narrow) {
    bool close = false;
    for (const CellIndex& d : doors) {
      const double dx = c.x - d.x;
      const double dy = c.y - d.y;
      if (dx * dx + dy * dy < min_sep * min_sep) {
        close = true;
        break;
      }
    }
    if (!close) doors.push_back(c);
  }
  return doors;
}

}  // namespace

BuildingModel builtin_office_model() {
  BuildingModel m;
  const double wall_z = 3.0;
  // Outer shell 16 x 10 m, 0.2 m walls, main entrance on the south side.
  add_box(m, "wall_s_w", ElementClass::Wall, 0.0, 0.0, 7.4, 0.2, 0.0, wall_z);
  add_box(m, "wall_s_e", ElementClass::Wall, 8.4, 0.0, 16.0, 0.2, 0.0, wall_z);
  add_box(m, "door_main", ElementClass::Door, 7.4, 0.0, 8.4, 0.2, 0.0, 2.1);
  add_box(m, "wall_n_w", ElementClass::Wall, 0.0, 9.8, 1.0, 10.0, 0.0, wall_z);
  add_box(m, "win_n_1", ElementClass::Window, 1.0, 9.8, 2.5, 10.0, 0.8, 2.2);
  add_box(m, "wall_n_m", ElementClass::Wall, 2.5, 9.8, 9.0, 10.0, 0.0, wall_z);
  add_box(m, "win_n_2", ElementClass::Window, 9.0, 9.8, 10.5, 10.0, 0.8, 2.2);
  add_box(m, "wall_n_e", ElementClass::Wall, 10.5, 9.8, 16.0, 10.0, 0.0, wall_z);
  add_box(m, "wall_w", ElementClass::Wall, 0.0, 0.2, 0.2, 9.8, 0.0, wall_z);
  add_box(m, "wall_e", ElementClass::Wall, 15.8, 0.2, 16.0, 9.8, 0.0, wall_z);

  // South rooms A/B/C below the corridor (corridor y in [4.2, 5.8]).
  add_box(m, "wall_ab", ElementClass::Wall, 5.0, 0.2, 5.2, 4.2, 0.0, wall_z);
  add_box(m, "wall_bc", ElementClass::Wall, 10.0, 0.2, 10.2, 4.2, 0.0, wall_z);
  add_box(m, "wall_cs1", ElementClass::Wall, 0.2, 4.0, 2.2, 4.2, 0.0, wall_z);
  add_box(m, "door_a", ElementClass::Door, 2.2, 4.0, 3.1, 4.2, 0.0, 2.1);
  add_box(m, "wall_cs2", ElementClass::Wall, 3.1, 4.0, 7.1, 4.2, 0.0, wall_z);
  add_box(m, "door_b", ElementClass::Door, 7.1, 4.0, 8.0, 4.2, 0.0, 2.1);
  add_box(m, "wall_cs3", ElementClass::Wall, 8.0, 4.0, 12.4, 4.2, 0.0, wall_z);
  add_box(m, "door_c", ElementClass::Door, 12.4, 4.0, 13.3, 4.2, 0.0, 2.1);
  add_box(m, "wall_cs4", ElementClass::Wall, 13.3, 4.0, 15.8, 4.2, 0.0, wall_z);

  // North rooms D/E above the corridor.
  add_box(m, "wall_de", ElementClass::Wall, 8.0, 6.0, 8.2, 9.8, 0.0, wall_z);
  add_box(m, "wall_cn1", ElementClass::Wall, 0.2, 5.8, 3.9, 6.0, 0.0, wall_z);
  add_box(m, "door_d", ElementClass::Door, 3.9, 5.8, 4.8, 6.0, 0.0, 2.1);
  add_box(m, "wall_cn2", ElementClass::Wall, 4.8, 5.8, 11.3, 6.0, 0.0, wall_z);
  add_box(m, "door_e", ElementClass::Door, 11.3, 5.8, 12.2, 6.0, 0.0, 2.1);
  add_box(m, "wall_cn3", ElementClass::Wall, 12.2, 5.8, 15.8, 6.0, 0.0, wall_z);

  // Corridor columns, off-center for asymmetry.
  add_box(m, "col_1", ElementClass::Column, 5.4, 4.2, 5.7, 4.5, 0.0, wall_z);
  add_box(m, "col_2", ElementClass::Column, 11.4, 5.5, 11.7, 5.8, 0.0, wall_z);

  // Floor slab, below any cut plane used for navigation maps.
  add_box(m, "slab", ElementClass::Slab, 0.0, 0.0, 16.0, 10.0, -0.2, 0.0);

  // Spaces close nothing here but mirror how full-entity exports look.
  add_box(m, "space_corridor", ElementClass::Space, 0.2, 4.2, 15.8, 5.8, 0.0,
          wall_z);
  return m;
}

BuildingModel builtin_apartment_model() {
  BuildingModel m;
  const double wall_z = 2.8;
  // 9 x 7 m, hall in the middle column, three rooms around it.
  add_box(m, "wall_s_w", ElementClass::Wall, 0.0, 0.0, 4.0, 0.2, 0.0, wall_z);
  add_box(m, "door_main", ElementClass::Door, 4.0, 0.0, 4.9, 0.2, 0.0, 2.1);
  add_box(m, "wall_s_e", ElementClass::Wall, 4.9, 0.0, 9.0, 0.2, 0.0, wall_z);
  add_box(m, "wall_n", ElementClass::Wall, 0.0, 6.8, 9.0, 7.0, 0.0, wall_z);
  add_box(m, "wall_w", ElementClass::Wall, 0.0, 0.2, 0.2, 6.8, 0.0, wall_z);
  add_box(m, "wall_e", ElementClass::Wall, 8.8, 0.2, 9.0, 6.8, 0.0, wall_z);

  // Left room | hall | right rooms.
  add_box(m, "wall_l1", ElementClass::Wall, 3.0, 0.2, 3.2, 3.0, 0.0, wall_z);
  add_box(m, "door_l", ElementClass::Door, 3.0, 3.0, 3.2, 3.9, 0.0, 2.1);
  add_box(m, "wall_l2", ElementClass::Wall, 3.0, 3.9, 3.2, 6.8, 0.0, wall_z);

  add_box(m, "wall_r1", ElementClass::Wall, 5.8, 0.2, 6.0, 1.5, 0.0, wall_z);
  add_box(m, "door_rb", ElementClass::Door, 5.8, 1.5, 6.0, 2.4, 0.0, 2.1);
  add_box(m, "wall_r2", ElementClass::Wall, 5.8, 2.4, 6.0, 4.5, 0.0, wall_z);
  add_box(m, "door_rt", ElementClass::Door, 5.8, 4.5, 6.0, 5.4, 0.0, 2.1);
  add_box(m, "wall_r3", ElementClass::Wall, 5.8, 5.4, 6.0, 6.8, 0.0, wall_z);

  add_box(m, "wall_rsplit", ElementClass::Wall, 6.0, 3.5, 8.8, 3.7, 0.0,
          wall_z);

  add_box(m, "slab", ElementClass::Slab, 0.0, 0.0, 9.0, 7.0, -0.2, 0.0);
  return m;
}

BuildingModel builtin_symmetric_model() {
  BuildingModel m;
  const double wall_z = 3.0;
  // Two identical rooms joined by a central corridor; 180-degree rotational
  // symmetry keeps global localization ambiguous.
  add_box(m, "wall_s", ElementClass::Wall, 0.0, 0.0, 10.0, 0.2, 0.0, wall_z);
  add_box(m, "wall_n", ElementClass::Wall, 0.0, 5.8, 10.0, 6.0, 0.0, wall_z);
  add_box(m, "wall_w", ElementClass::Wall, 0.0, 0.2, 0.2, 5.8, 0.0, wall_z);
  add_box(m, "wall_e", ElementClass::Wall, 9.8, 0.2, 10.0, 5.8, 0.0, wall_z);

  add_box(m, "wall_l1", ElementClass::Wall, 4.0, 0.2, 4.2, 2.55, 0.0, wall_z);
  add_box(m, "door_l", ElementClass::Door, 4.0, 2.55, 4.2, 3.45, 0.0, 2.1);
  add_box(m, "wall_l2", ElementClass::Wall, 4.0, 3.45, 4.2, 5.8, 0.0, wall_z);

  add_box(m, "wall_r1", ElementClass::Wall, 5.8, 0.2, 6.0, 2.55, 0.0, wall_z);
  add_box(m, "door_r", ElementClass::Door, 5.8, 2.55, 6.0, 3.45, 0.0, 2.1);
  add_box(m, "wall_r2", ElementClass::Wall, 5.8, 3.45, 6.0, 5.8, 0.0, wall_z);

  add_box(m, "slab", ElementClass::Slab, 0.0, 0.0, 10.0, 6.0, -0.2, 0.0);
  return m;
}

OccupancyGrid builtin_map(const std::string& name, double resolution) {
  BuildingModel model;
  if (name == "office") {
    model = builtin_office_model();
  } else if (name == "apartment") {
    model = builtin_apartment_model();
  } else if (name == "symmetric") {
    model = builtin_symmetric_model();
  } else {
    throw std::runtime_error("unknown built-in map '" + name + "'");
  }
  const SliceResult sliced = slice(model, 1.0, resolution);
  return classify_regions(sliced.structural, sliced.full);
}

Scenario make_scenario(const OccupancyGrid& base_grid, int level,
                       bool with_agents, const ScenarioParams& params,
                       std::uint64_t seed) {
  if (level < 1 || level > 3) {
    throw std::runtime_error("make_scenario: level must be 1, 2 or 3");
  }
  Scenario scenario;
  scenario.level = level;
  scenario.with_agents = with_agents;
  scenario.name = std::to_string(level) + (with_agents ? "-2" : "-1");
  scenario.base_grid = base_grid;
  scenario.world_grid = base_grid;

  const std::size_t n_free = base_grid.count(CellState::Free);
  if (n_free == 0) {
    throw std::runtime_error("make_scenario: base grid has no Free area");
  }
  const int base_components = count_free_components(base_grid);
  Rng world_rng(seed);

  if (level >= 2) {
    OccupancyGrid& world = scenario.world_grid;

    if (level == 3) {
      // Seal a couple of doorways first; the remaining clutter must not
      // split the Free space any further.
      const auto doors = detect_door_cells(base_grid, 0.65);
      std::vector<CellIndex> shuffled = doors;
      for (std::size_t i = shuffled.size(); i > 1; --i) {
        std::swap(shuffled[i - 1],
                  shuffled[world_rng.uniform_int(0, static_cast<int>(i) - 1)]);
      }
      const int n_block =
          std::min<int>(params.blocked_doors, static_cast<int>(shuffled.size()));
      const std::vector<float> clearance = distance_to_occupied(base_grid, 1e6);
      for (int d = 0; d < n_block; ++d) {
        const CellIndex c = shuffled[d];
        const double r_m =
            clearance[static_cast<std::size_t>(c.y) * base_grid.width() + c.x] +
            2.0 * base_grid.resolution();
        const int r = static_cast<int>(std::ceil(r_m / base_grid.resolution()));
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const CellIndex n{c.x + dx, c.y + dy};
            if (!world.in_bounds(n)) continue;
            if (dx * dx + dy * dy > r * r) continue;
            if (world.at(n) == CellState::Free) {
              world.set(n, CellState::Occupied);
            }
          }
        }
      }
    }

    const int components_now = count_free_components(scenario.world_grid);

    // Furniture anchored against base walls.
    std::vector<CellIndex> anchors;
    for (const CellIndex& c : free_cells_of(base_grid)) {
      bool wall_adjacent = false;
      for (int dy = -1; dy <= 1 && !wall_adjacent; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const CellIndex n{c.x + dx, c.y + dy};
          if (base_grid.in_bounds(n) &&
              base_grid.at(n) == CellState::Occupied) {
            wall_adjacent = true;
            break;
          }
        }
      }
      if (wall_adjacent && scenario.world_grid.at(c) == CellState::Free) {
        anchors.push_back(c);
      }
    }
    const double fraction = level == 2 ? params.clutter_fraction_reality
                                       : params.clutter_fraction_disaster;
    const auto target =
        static_cast<std::size_t>(std::lround(fraction * n_free));
    std::size_t placed =
        place_clutter(scenario.world_grid, anchors, target,
                      params.furniture_min, params.furniture_max,
                      components_now, world_rng);

    if (level == 3) {
      // Free-standing debris, anywhere in the remaining Free space.
      const auto debris_anchors = free_cells_of(scenario.world_grid);
      for (int d = 0; d < params.debris_count; ++d) {
        placed += place_clutter(scenario.world_grid, debris_anchors, 1,
                                params.debris_min, params.debris_max,
                                components_now, world_rng);
      }
    }
    scenario.achieved_clutter_fraction =
        static_cast<double>(placed) / static_cast<double>(n_free);
  }

  // Robot trajectory: tour of the world's skeleton spine (largest piece).
  CellMask spine = skeletonize(scenario.world_grid);
  if (params.trajectory_dilation > 0) {
    spine = dilate(scenario.world_grid, spine, params.trajectory_dilation);
  }
  spine = largest_component(spine);
  if (spine.count() == 0) {
    throw std::runtime_error("make_scenario: no navigable area");
  }
  const CellIndex start = default_start_cell(scenario.world_grid, spine);
  scenario.trajectory = wavefront_plan(scenario.world_grid, spine, start,
                                       params.trajectory_stride);

  if (with_agents) {
    Rng agent_rng(seed + 1);
    const int n_agents =
        level == 3 ? params.agents_disaster : params.agents_normal;
    const double speed = params.agent_speed *
                         (level == 3 ? params.agent_speed_factor : 1.0);
    const auto world_free = free_cells_of(scenario.world_grid);

    // Exit: the Free cell closest to the map border (the entrance pocket).
    CellIndex exit_cell = world_free.front();
    int best_border = std::numeric_limits<int>::max();
    for (const CellIndex& c : world_free) {
      const int border = std::min(
          std::min(c.x, scenario.world_grid.width() - 1 - c.x),
          std::min(c.y, scenario.world_grid.height() - 1 - c.y));
      if (border < best_border) {
        best_border = border;
        exit_cell = c;
      }
    }

    for (int a = 0; a < n_agents && !world_free.empty(); ++a) {
      std::vector<CellIndex> cells;
      for (int attempt = 0; attempt < 50 && cells.empty(); ++attempt) {
        const CellIndex s = world_free[agent_rng.uniform_int(
            0, static_cast<int>(world_free.size()) - 1)];
        const double d = std::hypot(double(s.x - exit_cell.x),
                                    double(s.y - exit_cell.y)) *
                         scenario.world_grid.resolution();
        if (d < 2.0) continue;  // start some distance from the exit
        cells = bfs_path(scenario.world_grid, s, exit_cell);
      }
      if (cells.empty()) continue;
      Agent agent;
      agent.speed = speed;
      agent.radius = params.agent_radius;
      agent.loop = true;
      const std::size_t step = 10;
      for (std::size_t i = 0; i < cells.size(); i += step) {
        agent.path.push_back(scenario.world_grid.cell_to_world(cells[i]));
      }
      if (cells.size() % step != 1) {
        agent.path.push_back(scenario.world_grid.cell_to_world(cells.back()));
      }
      scenario.agents.push_back(std::move(agent));
    }
  }
  return scenario;
}

std::vector<Scenario> make_scenarios(const OccupancyGrid& base_grid,
                                     const ScenarioParams& params,
                                     std::uint64_t seed) {
  std::vector<Scenario> scenarios;
  for (int level = 1; level <= 3; ++level) {
    // Both agent variants of a level share one world and trajectory.
    const std::uint64_t level_seed = seed + static_cast<std::uint64_t>(level);
    scenarios.push_back(
        make_scenario(base_grid, level, false, params, level_seed));
    scenarios.push_back(
        make_scenario(base_grid, level, true, params, level_seed));
  }
  return scenarios;
}

}  // namespace gridgraph
