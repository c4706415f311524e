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

#include "gridgraph/skeleton.hpp"

#include <array>

namespace gridgraph {

namespace {

// Neighbor order p2..p9: N, NE, E, SE, S, SW, W, NW (grid y grows north).
constexpr std::array<std::array<int, 2>, 8> kRing = {{
    {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1},
}};

std::array<bool, 8> ring_values(const CellMask& m, int x, int y) {
  std::array<bool, 8> v{};
  for (int i = 0; i < 8; ++i) {
    const int nx = x + kRing[i][0];
    const int ny = y + kRing[i][1];
    v[i] = m.in_bounds(nx, ny) && m.at(nx, ny);
  }
  return v;
}

int neighbor_count(const std::array<bool, 8>& v) {
  int b = 0;
  for (const bool s : v) b += s;
  return b;
}

int transitions(const std::array<bool, 8>& v) {
  int a = 0;
  for (int i = 0; i < 8; ++i) {
    if (!v[i] && v[(i + 1) % 8]) ++a;
  }
  return a;
}

int component_count(const CellMask& m) {
  return count_components8(m.width, m.height,
                           [&](int x, int y) { return m.at(x, y); });
}

// Labels 8-connected components; returns label array and component count.
int label_components(const CellMask& m, std::vector<int>& labels) {
  labels.assign(m.bits.size(), -1);
  int next = 0;
  std::vector<std::array<int, 2>> stack;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * m.width + x;
      if (!m.at(x, y) || labels[idx] >= 0) continue;
      const int label = next++;
      labels[idx] = label;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (const auto& d : kRing) {
          const int nx = cx + d[0];
          const int ny = cy + d[1];
          if (!m.in_bounds(nx, ny) || !m.at(nx, ny)) continue;
          const std::size_t nidx = static_cast<std::size_t>(ny) * m.width + nx;
          if (labels[nidx] >= 0) continue;
          labels[nidx] = label;
          stack.push_back({nx, ny});
        }
      }
    }
  }
  return next;
}

}  // namespace

bool is_simple_point(const CellMask& mask, int x, int y) {
  const std::array<bool, 8> v = ring_values(mask, x, y);
  const int b = neighbor_count(v);
  if (b == 0) return false;
  // One 8-connected foreground component within the ring. Ring cells i and j
  // are adjacent iff their offsets differ by at most one step in each axis.
  std::array<int, 8> comp{};
  comp.fill(-1);
  int ncomp = 0;
  for (int i = 0; i < 8; ++i) {
    if (!v[i] || comp[i] >= 0) continue;
    const int label = ncomp++;
    std::array<int, 8> stack{};
    int top = 0;
    stack[top++] = i;
    comp[i] = label;
    while (top > 0) {
      const int c = stack[--top];
      for (int j = 0; j < 8; ++j) {
        if (!v[j] || comp[j] >= 0) continue;
        if (std::abs(kRing[c][0] - kRing[j][0]) <= 1 &&
            std::abs(kRing[c][1] - kRing[j][1]) <= 1) {
          comp[j] = label;
          stack[top++] = j;
        }
      }
    }
  }
  if (ncomp != 1) return false;
  // A background 4-neighbor must exist, otherwise removal opens a hole.
  return !v[0] || !v[2] || !v[4] || !v[6];
}

CellMask skeletonize(const OccupancyGrid& grid) {
  CellMask mask(grid.width(), grid.height(), grid.content_hash());
  bool has_free = false;
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      if (grid.at(x, y) == CellState::Free) {
        mask.set(x, y);
        has_free = true;
      }
    }
  }
  if (!has_free) return mask;

  const int components_before = component_count(mask);

  const auto zs_candidate = [](const std::array<bool, 8>& v, int sub) {
    const int b = neighbor_count(v);
    if (b < 2 || b > 6) return false;
    if (transitions(v) != 1) return false;
    // v indices: 0=N(p2) 2=E(p4) 4=S(p6) 6=W(p8)
    if (sub == 0) {
      return (!v[0] || !v[2] || !v[4]) && (!v[2] || !v[4] || !v[6]);
    }
    return (!v[0] || !v[2] || !v[6]) && (!v[0] || !v[4] || !v[6]);
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (int sub = 0; sub < 2; ++sub) {
      const CellMask snapshot = mask;
      std::vector<CellIndex> candidates;
      for (int y = 0; y < snapshot.height; ++y) {
        for (int x = 0; x < snapshot.width; ++x) {
          if (!snapshot.at(x, y)) continue;
          if (zs_candidate(ring_values(snapshot, x, y), sub)) {
            candidates.push_back({x, y});
          }
        }
      }
      if (candidates.empty()) continue;

      // Never wipe out a whole component; retain its first pixel.
      std::vector<int> labels;
      const int ncomp = label_components(snapshot, labels);
      std::vector<int> comp_size(ncomp, 0), cand_in_comp(ncomp, 0);
      for (std::size_t i = 0; i < snapshot.bits.size(); ++i) {
        if (snapshot.bits[i]) ++comp_size[labels[i]];
      }
      for (const auto& c : candidates) {
        ++cand_in_comp[labels[static_cast<std::size_t>(c.y) * mask.width +
                              c.x]];
      }
      std::vector<std::uint8_t> skip_once(ncomp, 0);
      for (int i = 0; i < ncomp; ++i) {
        skip_once[i] = (cand_in_comp[i] == comp_size[i]) ? 1 : 0;
      }

      CellMask next = snapshot;
      for (const auto& c : candidates) {
        const int label =
            labels[static_cast<std::size_t>(c.y) * mask.width + c.x];
        if (skip_once[label]) {
          skip_once[label] = 0;
          continue;
        }
        next.set(c.x, c.y, false);
      }

      if (component_count(next) != components_before) {
        // Parallel deletion split a region; redo this pass sequentially with
        // a per-deletion simple-point check, which cannot change topology.
        next = snapshot;
        for (const auto& c : candidates) {
          if (!next.at(c.x, c.y)) continue;
          if (!is_simple_point(next, c.x, c.y)) continue;
          if (neighbor_count(ring_values(next, c.x, c.y)) < 2) continue;
          next.set(c.x, c.y, false);
        }
      }

      for (std::size_t i = 0; i < mask.bits.size(); ++i) {
        if (mask.bits[i] != next.bits[i]) {
          changed = true;
          break;
        }
      }
      mask = std::move(next);
    }
  }

  // Post-pass: thinning can leave fully set 2x2 blocks; peel them with
  // topology-safe single deletions.
  bool progress = true;
  while (progress) {
    progress = false;
    for (int y = 0; y + 1 < mask.height && !progress; ++y) {
      for (int x = 0; x + 1 < mask.width && !progress; ++x) {
        if (!(mask.at(x, y) && mask.at(x + 1, y) && mask.at(x, y + 1) &&
              mask.at(x + 1, y + 1))) {
          continue;
        }
        const std::array<CellIndex, 4> corners = {{
            {x, y}, {x + 1, y}, {x, y + 1}, {x + 1, y + 1}}};
        for (const auto& c : corners) {
          if (is_simple_point(mask, c.x, c.y) &&
              neighbor_count(ring_values(mask, c.x, c.y)) >= 2) {
            mask.set(c.x, c.y, false);
            progress = true;
            break;
          }
        }
      }
    }
  }
  return mask;
}

CellMask dilate(const OccupancyGrid& grid, const CellMask& mask, int radius) {
  if (!mask.matches(grid)) {
    throw std::runtime_error("dilate: mask dimension mismatch");
  }
  if (radius < 0) {
    throw std::runtime_error("dilate: negative radius");
  }
  // Existing bits are kept as-is; only the expansion is clipped to Free.
  CellMask out = mask;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (!out.in_bounds(nx, ny)) continue;
          if (grid.at(nx, ny) != CellState::Free) continue;
          out.set(nx, ny);
        }
      }
    }
  }
  return out;
}

}  // namespace gridgraph
