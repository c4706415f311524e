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

#include "gridgraph/distance_field.hpp"

#include <cmath>
#include <limits>

namespace gridgraph {

namespace {

// Felzenszwalb-Huttenlocher 1D squared distance transform.
void edt_1d(const std::vector<double>& f, std::vector<double>& d) {
  const int n = static_cast<int>(f.size());
  d.assign(n, 0.0);
  std::vector<int> v(n, 0);
  std::vector<double> z(n + 1, 0.0);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s =
        ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s =
          ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

std::vector<float> distance_to_occupied(const OccupancyGrid& grid,
                                        double cap_m) {
  const int w = grid.width();
  const int h = grid.height();
  const double inf = 1e12;
  std::vector<double> sq(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < sq.size(); ++i) {
    sq[i] = grid.cells()[i] == CellState::Occupied ? 0.0 : inf;
  }
  std::vector<double> col(h), tmp(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      col[y] = sq[static_cast<std::size_t>(y) * w + x];
    }
    edt_1d(col, tmp);
    for (int y = 0; y < h; ++y) {
      sq[static_cast<std::size_t>(y) * w + x] = tmp[y];
    }
  }
  std::vector<double> row(w), row_out(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      row[x] = sq[static_cast<std::size_t>(y) * w + x];
    }
    edt_1d(row, row_out);
    for (int x = 0; x < w; ++x) {
      sq[static_cast<std::size_t>(y) * w + x] = row_out[x];
    }
  }
  std::vector<float> out(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double d = std::sqrt(sq[i]) * grid.resolution();
    out[i] = static_cast<float>(std::min(d, cap_m));
  }
  return out;
}

}  // namespace gridgraph
