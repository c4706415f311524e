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

#ifndef GRIDGRAPH_GRID_HPP
#define GRIDGRAPH_GRID_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gridgraph/pose2.hpp"

namespace gridgraph {

enum class CellState : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

struct CellIndex {
  int x = 0;  // column
  int y = 0;  // row, row 0 is the world-bottom row

  bool operator==(const CellIndex& o) const { return x == o.x && y == o.y; }
  bool operator!=(const CellIndex& o) const { return !(*this == o); }
};

// Trinary occupancy raster. Cells are stored row-major with row 0 at the
// world-minimum y side; origin is the world pose of the outer corner of
// cell (0, 0). Immutable use after construction is thread-safe.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double resolution, const Pose2& origin,
                CellState fill = CellState::Unknown)
      : width_(width),
        height_(height),
        resolution_(resolution),
        origin_(origin),
        cells_(static_cast<std::size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0) {
      throw std::invalid_argument("OccupancyGrid: non-positive dimensions");
    }
    if (resolution <= 0.0) {
      throw std::invalid_argument("OccupancyGrid: non-positive resolution");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  const Pose2& origin() const { return origin_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool in_bounds(const CellIndex& c) const { return in_bounds(c.x, c.y); }

  CellState at(int x, int y) const {
    return cells_[static_cast<std::size_t>(y) * width_ + x];
  }
  CellState at(const CellIndex& c) const { return at(c.x, c.y); }

  CellState checked_at(int x, int y) const {
    if (!in_bounds(x, y)) throw std::out_of_range("OccupancyGrid: cell index");
    return at(x, y);
  }

  void set(int x, int y, CellState s) {
    cells_[static_cast<std::size_t>(y) * width_ + x] = s;
  }
  void set(const CellIndex& c, CellState s) { set(c.x, c.y, s); }

  const std::vector<CellState>& cells() const { return cells_; }
  std::vector<CellState>& cells() { return cells_; }

  // World <-> grid-local metric coordinates. Local frame: origin corner at
  // (0, 0), cell (x, y) spans [x*res, (x+1)*res) x [y*res, (y+1)*res).
  Point2 world_to_local(const Point2& w) const {
    const double c = std::cos(origin_.theta);
    const double s = std::sin(origin_.theta);
    const double dx = w.x - origin_.x;
    const double dy = w.y - origin_.y;
    return {c * dx + s * dy, -s * dx + c * dy};
  }
  Point2 local_to_world(const Point2& l) const {
    return origin_.transform(l);
  }

  CellIndex world_to_cell(const Point2& w) const {
    const Point2 l = world_to_local(w);
    return {static_cast<int>(std::floor(l.x / resolution_)),
            static_cast<int>(std::floor(l.y / resolution_))};
  }

  // Center of the cell in world coordinates.
  Point2 cell_to_world(const CellIndex& c) const {
    return local_to_world(
        {(c.x + 0.5) * resolution_, (c.y + 0.5) * resolution_});
  }

  bool same_frame(const OccupancyGrid& o, double tol = 1e-9) const {
    return width_ == o.width_ && height_ == o.height_ &&
           std::abs(resolution_ - o.resolution_) <= tol &&
           approx_equal(origin_, o.origin_, tol);
  }

  std::size_t count(CellState s) const {
    std::size_t n = 0;
    for (const CellState c : cells_) n += (c == s);
    return n;
  }

  // FNV-1a over the header and payload; used for provenance stamps.
  std::uint64_t content_hash() const;

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.0;
  Pose2 origin_;
  std::vector<CellState> cells_;
};

// Boolean mask over the cells of one OccupancyGrid.
struct CellMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;
  std::uint64_t parent_grid_id = 0;

  CellMask() = default;
  CellMask(int w, int h, std::uint64_t parent = 0)
      : width(w), height(h),
        bits(static_cast<std::size_t>(w) * h, 0),
        parent_grid_id(parent) {}

  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  bool at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool v = true) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t count() const {
    std::size_t n = 0;
    for (const auto b : bits) n += (b != 0);
    return n;
  }
  bool matches(const OccupancyGrid& g) const {
    return width == g.width() && height == g.height();
  }
};

// Number of 8-connected components of the given predicate over the grid.
template <typename Pred>
int count_components8(int width, int height, Pred inside) {
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(width) * height, 0);
  std::vector<CellIndex> stack;
  int components = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * width + x;
      if (seen[idx] || !inside(x, y)) continue;
      ++components;
      seen[idx] = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const CellIndex c = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = c.x + dx;
            const int ny = c.y + dy;
            if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
            const std::size_t nidx =
                static_cast<std::size_t>(ny) * width + nx;
            if (seen[nidx] || !inside(nx, ny)) continue;
            seen[nidx] = 1;
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }
  return components;
}

}  // namespace gridgraph

#endif  // GRIDGRAPH_GRID_HPP
