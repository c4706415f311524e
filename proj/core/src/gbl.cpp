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

#include "gridgraph/gbl.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gridgraph {

namespace {

constexpr int kCoarseFactor = 4;

struct BeamEndpoint {
  double x = 0.0;  // sensor frame
  double y = 0.0;
};

std::vector<BeamEndpoint> finite_endpoints(const Scan& scan) {
  std::vector<BeamEndpoint> pts;
  pts.reserve(scan.ranges.size());
  for (std::size_t b = 0; b < scan.ranges.size(); ++b) {
    const double r = scan.ranges[b];
    if (!is_return(r)) continue;
    const double bearing = scan.spec.bearing(static_cast<int>(b));
    pts.push_back({r * std::cos(bearing), r * std::sin(bearing)});
  }
  return pts;
}

double range_percentile90(const Scan& scan) {
  std::vector<double> finite;
  for (const double r : scan.ranges) {
    if (is_return(r)) finite.push_back(r);
  }
  if (finite.empty()) return scan.spec.range_max / 2.0;
  std::sort(finite.begin(), finite.end());
  return std::max(0.5, finite[static_cast<std::size_t>(0.9 * (finite.size() - 1))]);
}

// pooled[y][x] = max probability over submap cells [x, x+w) x [y, y+w).
std::vector<float> max_pool(const Submap& sm, int w) {
  const int width = sm.width;
  const int height = sm.height;
  std::vector<float> rows(static_cast<std::size_t>(width) * height, 0.0f);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      float m = 0.0f;
      const int hi = std::min(width, x + w);
      for (int k = x; k < hi; ++k) {
        if (sm.observed(k, y)) {
          m = std::max(m, static_cast<float>(sm.probability(k, y)));
        }
      }
      rows[static_cast<std::size_t>(y) * width + x] = m;
    }
  }
  std::vector<float> pooled(rows.size(), 0.0f);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      float m = 0.0f;
      const int hi = std::min(height, y + w);
      for (int k = y; k < hi; ++k) {
        m = std::max(m, rows[static_cast<std::size_t>(k) * width + x]);
      }
      pooled[static_cast<std::size_t>(y) * width + x] = m;
    }
  }
  return pooled;
}

}  // namespace

MatchResult match(const Scan& scan, const Submap& submap, const Pose2& initial,
                  const SearchWindow& window, const GblConfig& cfg) {
  const std::vector<BeamEndpoint> beams = finite_endpoints(scan);
  if (beams.empty()) {
    throw std::runtime_error("match: scan has no finite returns");
  }
  const double res = submap.resolution;
  const Pose2 initial_local = submap.origin.between(initial);

  // Precondition: the initial guess must lie inside the submap expanded by
  // the search window.
  const double margin_x = window.x + res;
  const double margin_y = window.y + res;
  if (initial_local.x < submap.local_min.x - margin_x ||
      initial_local.y < submap.local_min.y - margin_y ||
      initial_local.x > submap.local_min.x + submap.width * res + margin_x ||
      initial_local.y > submap.local_min.y + submap.height * res + margin_y) {
    throw std::runtime_error("match: no candidate inside submap bounds");
  }

  const double theta_step = res / range_percentile90(scan);
  const int k_max = static_cast<int>(std::ceil(window.theta / theta_step));
  const int i_max = static_cast<int>(std::ceil(window.x / res));
  const int j_max = static_cast<int>(std::ceil(window.y / res));

  const std::vector<float> pooled = max_pool(submap, kCoarseFactor);
  auto pooled_at = [&](int x, int y) -> double {
    if (x < 0 || y < 0 || x >= submap.width || y >= submap.height) return 0.0;
    return pooled[static_cast<std::size_t>(y) * submap.width + x];
  };
  auto prob_at = [&](int x, int y) -> double {
    if (x < 0 || y < 0 || x >= submap.width || y >= submap.height) return 0.0;
    return submap.observed(x, y) ? submap.probability(x, y) : 0.0;
  };

  // Base cell indices per rotation; integer translations shift them exactly.
  struct Candidate {
    double upper_bound;
    int k, i0, j0;
  };
  std::vector<Candidate> coarse;
  std::vector<std::vector<CellIndex>> base_cells(2 * k_max + 1);
  const double inv_res = 1.0 / res;
  for (int k = -k_max; k <= k_max; ++k) {
    const double theta = initial_local.theta + k * theta_step;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    auto& cells = base_cells[k + k_max];
    cells.reserve(beams.size());
    for (const BeamEndpoint& b : beams) {
      const double ex = initial_local.x + c * b.x - s * b.y;
      const double ey = initial_local.y + s * b.x + c * b.y;
      cells.push_back({static_cast<int>(std::floor((ex - submap.local_min.x) * inv_res)),
                       static_cast<int>(std::floor((ey - submap.local_min.y) * inv_res))});
    }
    for (int j0 = -j_max; j0 <= j_max; j0 += kCoarseFactor) {
      for (int i0 = -i_max; i0 <= i_max; i0 += kCoarseFactor) {
        double sum = 0.0;
        for (const CellIndex& cell : cells) {
          sum += pooled_at(cell.x + i0, cell.y + j0);
        }
        coarse.push_back({sum / beams.size(), k, i0, j0});
      }
    }
  }

  std::sort(coarse.begin(), coarse.end(), [](const Candidate& a, const Candidate& b) {
    if (a.upper_bound != b.upper_bound) return a.upper_bound > b.upper_bound;
    if (a.k != b.k) return a.k < b.k;
    if (a.i0 != b.i0) return a.i0 < b.i0;
    return a.j0 < b.j0;
  });

  double best_score = -1.0;
  int best_k = 0, best_i = 0, best_j = 0;
  for (const Candidate& cand : coarse) {
    if (cand.upper_bound <= best_score) break;
    const auto& cells = base_cells[cand.k + k_max];
    const int i_hi = std::min(cand.i0 + kCoarseFactor - 1, i_max);
    const int j_hi = std::min(cand.j0 + kCoarseFactor - 1, j_max);
    for (int j = cand.j0; j <= j_hi; ++j) {
      for (int i = cand.i0; i <= i_hi; ++i) {
        double sum = 0.0;
        for (const CellIndex& cell : cells) {
          sum += prob_at(cell.x + i, cell.y + j);
        }
        const double score = sum / beams.size();
        if (score > best_score) {
          best_score = score;
          best_k = cand.k;
          best_i = i;
          best_j = j;
        }
      }
    }
  }

  MatchResult result;
  const Pose2 best_local(initial_local.x + best_i * res,
                         initial_local.y + best_j * res,
                         initial_local.theta + best_k * theta_step);
  result.pose = submap.origin.compose(best_local);
  result.score = std::max(0.0, best_score);
  result.accepted = result.score >= cfg.min_score;
  return result;
}

namespace {

double window_cost(const WindowState& state) {
  double cost = 0.0;
  for (const auto& c : state.constraints) {
    const Pose2& from =
        c.from_is_fixed ? c.from_pose : state.nodes[c.from].pose;
    const Pose2 cur = from.between(state.nodes[c.to].pose);
    Eigen::Vector3d r(cur.x - c.relative.x, cur.y - c.relative.y,
                      normalize_angle(cur.theta - c.relative.theta));
    cost += r.dot(c.information * r);
  }
  return cost;
}

}  // namespace

OptimizeReport optimize_window(WindowState& state) {
  OptimizeReport report;
  if (state.constraints.empty()) {
    throw std::runtime_error("optimize_window: no constraints");
  }
  const int n = static_cast<int>(state.nodes.size());
  const int dim = 3 * n;

  report.initial_cost = window_cost(state);
  report.final_cost = report.initial_cost;
  if (report.initial_cost < 1e-24) return report;  // already at a stationary point

  double lambda = 1e-4;
  constexpr double kLambdaCeiling = 1e8;
  constexpr int kMaxIterations = 50;
  double cost = report.initial_cost;

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    for (const auto& c : state.constraints) {
      const Pose2& from =
          c.from_is_fixed ? c.from_pose : state.nodes[c.from].pose;
      const Pose2& to = state.nodes[c.to].pose;
      const double ct = std::cos(from.theta);
      const double st = std::sin(from.theta);
      const double dx = to.x - from.x;
      const double dy = to.y - from.y;
      const Pose2 cur = from.between(to);
      const Eigen::Vector3d r(cur.x - c.relative.x, cur.y - c.relative.y,
                              normalize_angle(cur.theta - c.relative.theta));

      Eigen::Matrix3d j_to;
      j_to << ct, st, 0.0,
             -st, ct, 0.0,
              0.0, 0.0, 1.0;
      const int to_base = 3 * c.to;
      h.block<3, 3>(to_base, to_base) +=
          j_to.transpose() * c.information * j_to;
      g.segment<3>(to_base) += j_to.transpose() * c.information * r;

      if (!c.from_is_fixed) {
        Eigen::Matrix3d j_from;
        j_from << -ct, -st, (-st * dx + ct * dy),
                   st, -ct, (-ct * dx - st * dy),
                  0.0, 0.0, -1.0;
        const int from_base = 3 * c.from;
        h.block<3, 3>(from_base, from_base) +=
            j_from.transpose() * c.information * j_from;
        h.block<3, 3>(from_base, to_base) +=
            j_from.transpose() * c.information * j_to;
        h.block<3, 3>(to_base, from_base) +=
            j_to.transpose() * c.information * j_from;
        g.segment<3>(from_base) += j_from.transpose() * c.information * r;
      }
    }

    bool stepped = false;
    while (lambda <= kLambdaCeiling) {
      Eigen::MatrixXd damped = h;
      for (int d = 0; d < dim; ++d) {
        damped(d, d) += lambda * std::max(h(d, d), 1e-9);
      }
      const Eigen::VectorXd delta = damped.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      std::vector<WindowState::Node> backup = state.nodes;
      for (int i = 0; i < n; ++i) {
        state.nodes[i].pose = Pose2(backup[i].pose.x + delta(3 * i),
                                    backup[i].pose.y + delta(3 * i + 1),
                                    backup[i].pose.theta + delta(3 * i + 2));
      }
      const double new_cost = window_cost(state);
      if (new_cost < cost) {
        const double rel_drop = (cost - new_cost) / std::max(cost, 1e-24);
        cost = new_cost;
        lambda = std::max(lambda * 0.1, 1e-12);
        ++report.iterations;
        report.accepted_costs.push_back(cost);
        stepped = true;
        if (rel_drop < 1e-6 || delta.lpNorm<Eigen::Infinity>() < 1e-8) {
          report.final_cost = cost;
          return report;
        }
        break;
      }
      state.nodes = std::move(backup);
      lambda *= 10.0;
    }
    if (!stepped) {
      // Damping hit the ceiling without an acceptable step.
      report.singular = lambda > kLambdaCeiling;
      break;
    }
  }
  report.final_cost = cost;
  return report;
}

TrackResult track(const PoseGraphMap& map, const Sequence& seq,
                  const Pose2& initial, const GblConfig& cfg) {
  if (map.submaps.empty()) {
    throw std::runtime_error("track: map has no submaps");
  }
  if (seq.scans.empty()) throw std::runtime_error("track: empty sequence");
  if (seq.odometry.size() < seq.scans.size()) {
    throw std::runtime_error("track: odometry missing for some scans");
  }

  TrackResult result;
  WindowState window;
  Eigen::Matrix3d odom_info = Eigen::Matrix3d::Zero();
  odom_info.diagonal() << cfg.odom_info_diag[0], cfg.odom_info_diag[1],
      cfg.odom_info_diag[2];

  int blind_streak = 0;
  Pose2 last_pose = initial;

  for (std::size_t i = 0; i < seq.scans.size(); ++i) {
    const Scan& scan = seq.scans[i];
    Pose2 predicted = last_pose;
    Pose2 odom_delta;
    if (i > 0) {
      odom_delta = seq.odometry[i - 1].pose.between(seq.odometry[i].pose);
      predicted = last_pose.compose(odom_delta);
    }

    // Two nearest submaps by origin distance to the prediction.
    std::vector<std::pair<double, int>> order;
    order.reserve(map.submaps.size());
    for (std::size_t s = 0; s < map.submaps.size(); ++s) {
      order.push_back({distance(map.submaps[s].origin.position(),
                                predicted.position()),
                       static_cast<int>(s)});
    }
    std::sort(order.begin(), order.end());
    if (order.size() > 2) order.resize(2);

    // New window node, linked to the previous one by odometry.
    WindowState::Node node;
    node.id = static_cast<int>(i);
    node.pose = predicted;
    node.stamp = scan.stamp;
    window.nodes.push_back(node);
    const int node_index = static_cast<int>(window.nodes.size()) - 1;
    if (node_index > 0) {
      WindowState::WindowConstraint oc;
      oc.from_is_fixed = false;
      oc.from = node_index - 1;
      oc.to = node_index;
      oc.relative = odom_delta;
      oc.information = odom_info;
      window.constraints.push_back(oc);
    }

    bool accepted_any = false;
    TrackStepDiagnostics diag;
    diag.stamp = scan.stamp;
    for (const auto& [dist_to, submap_idx] : order) {
      const Submap& submap = map.submaps[submap_idx];
      MatchResult m;
      try {
        m = match(scan, submap, predicted, cfg.window, cfg);
      } catch (const std::runtime_error&) {
        continue;  // prediction outside this submap
      }
      if (m.score > diag.score) {
        diag.score = m.score;
        diag.submap_id = submap.id;
        diag.accepted = m.accepted;
      }
      if (!m.accepted) continue;
      accepted_any = true;
      WindowState::WindowConstraint mc;
      mc.from_is_fixed = true;
      mc.from_pose = submap.origin;
      mc.to = node_index;
      mc.relative = submap.origin.between(m.pose);
      mc.information = Eigen::Matrix3d::Zero();
      mc.information.diagonal() << cfg.matcher_info_diag[0] * m.score,
          cfg.matcher_info_diag[1] * m.score,
          cfg.matcher_info_diag[2] * m.score;
      window.constraints.push_back(mc);
    }

    // Slide the window.
    while (static_cast<int>(window.nodes.size()) > cfg.window_size) {
      window.nodes.erase(window.nodes.begin());
      std::vector<WindowState::WindowConstraint> kept;
      for (auto& c : window.constraints) {
        if (!c.from_is_fixed && c.from == 0) continue;
        if (c.to == 0) continue;
        if (!c.from_is_fixed) --c.from;
        --c.to;
        kept.push_back(c);
      }
      window.constraints = std::move(kept);
    }

    bool have_matcher = false;
    for (const auto& c : window.constraints) {
      if (c.from_is_fixed) {
        have_matcher = true;
        break;
      }
    }
    if (have_matcher) {
      diag.cost_before = window_cost(window);
      const OptimizeReport report = optimize_window(window);
      diag.cost_after = report.final_cost;
    }

    last_pose = window.nodes.back().pose;
    result.trajectory.push_back({scan.stamp, last_pose});

    if (accepted_any) {
      blind_streak = 0;
    } else {
      ++blind_streak;
      diag.blind = true;
      if (blind_streak > cfg.max_blind) {
        diag.diverged = true;
        result.diverged = true;
      }
    }
    result.diagnostics.push_back(diag);
  }
  return result;
}

std::string track_diagnostics_csv(const TrackResult& result) {
  std::string out =
      "stamp,submap_id,score,accepted,cost_before,cost_after,blind,diverged\n";
  char buf[256];
  for (const auto& d : result.diagnostics) {
    std::snprintf(buf, sizeof(buf), "%.6f,%d,%.4f,%d,%.6f,%.6f,%d,%d\n",
                  d.stamp, d.submap_id, d.score, d.accepted ? 1 : 0,
                  d.cost_before, d.cost_after, d.blind ? 1 : 0,
                  d.diverged ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace gridgraph
