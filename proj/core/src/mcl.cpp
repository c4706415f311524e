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

#include "gridgraph/mcl.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "gridgraph/distance_field.hpp"
#include "gridgraph/lidar.hpp"

namespace gridgraph {

namespace {

// Acklam's inverse normal CDF approximation; enough for the KLD bound.
double probit(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
            a[5]) *
           q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
           c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

std::vector<CellIndex> collect_free_cells(const OccupancyGrid& grid) {
  std::vector<CellIndex> cells;
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      if (grid.at(x, y) == CellState::Free) cells.push_back({x, y});
    }
  }
  return cells;
}

Pose2 sample_in_cell(const OccupancyGrid& grid, const CellIndex& c, Rng& rng) {
  const Point2 center = grid.cell_to_world(c);
  const double half = grid.resolution() / 2.0;
  return Pose2(center.x + rng.uniform(-half, half),
               center.y + rng.uniform(-half, half),
               rng.uniform(-M_PI, M_PI));
}

}  // namespace

LikelihoodField::LikelihoodField(const OccupancyGrid& grid, double sigma_hit,
                                 double z_hit, double z_rand, double d_max,
                                 double range_max)
    : grid_(grid),
      sigma_hit_(sigma_hit),
      z_hit_(z_hit),
      z_rand_(z_rand),
      d_max_(d_max),
      range_max_(range_max) {
  if (z_hit_ + z_rand_ > 1.0 + 1e-9) {
    throw std::runtime_error("likelihood field: z_hit + z_rand > 1");
  }
  distance_ = distance_to_occupied(grid, d_max_);
}

double LikelihoodField::distance_at(const Point2& world) const {
  const CellIndex c = grid_.world_to_cell(world);
  if (!grid_.in_bounds(c)) return d_max_;
  return distance_[static_cast<std::size_t>(c.y) * grid_.width() + c.x];
}

double LikelihoodField::probability_at(const Point2& world) const {
  const double d = distance_at(world);
  return z_hit_ * std::exp(-d * d / (2.0 * sigma_hit_ * sigma_hit_)) +
         z_rand_ / range_max_;
}

ParticleSet init_tracking(const OccupancyGrid& grid, const Pose2& pose0,
                          const std::array<double, 3>& sigma, int n,
                          std::uint64_t seed) {
  if (n < 1) throw std::runtime_error("init_tracking: n < 1");
  ParticleSet set;
  set.rng = Rng(seed);
  set.particles.reserve(n);
  for (int i = 0; i < n; ++i) {
    Pose2 pose;
    for (int attempt = 0; attempt < 100; ++attempt) {
      pose = Pose2(pose0.x + set.rng.normal(sigma[0]),
                   pose0.y + set.rng.normal(sigma[1]),
                   pose0.theta + set.rng.normal(sigma[2]));
      const CellIndex c = grid.world_to_cell(pose.position());
      if (grid.in_bounds(c) && grid.at(c) == CellState::Free) break;
    }
    set.particles.push_back({pose, 1.0 / n});
  }
  return set;
}

ParticleSet init_global_uniform(const OccupancyGrid& grid, int n,
                                std::uint64_t seed) {
  const auto free_cells = collect_free_cells(grid);
  if (free_cells.empty()) {
    throw std::runtime_error("init_global_uniform: map has no Free cells");
  }
  ParticleSet set;
  set.rng = Rng(seed);
  set.particles.reserve(n);
  for (int i = 0; i < n; ++i) {
    const CellIndex c =
        free_cells[set.rng.uniform_int(0, static_cast<int>(free_cells.size()) - 1)];
    set.particles.push_back({sample_in_cell(grid, c, set.rng), 1.0 / n});
  }
  return set;
}

SerField build_ser_field(const OccupancyGrid& grid, double range_max) {
  SerField field;
  field.range_max = range_max;
  field.free_cells = collect_free_cells(grid);
  field.signatures.reserve(field.free_cells.size());
  for (const CellIndex& c : field.free_cells) {
    const Point2 p = grid.cell_to_world(c);
    std::array<float, 8> sig{};
    for (int k = 0; k < 8; ++k) {
      const double r = cast_ray(grid, p, k * M_PI / 4.0, range_max);
      sig[k] = static_cast<float>(is_return(r) ? r : range_max);
    }
    std::sort(sig.begin(), sig.end());
    field.signatures.push_back(sig);
  }
  return field;
}

ParticleSet init_global_ser(const OccupancyGrid& grid, const Scan& scan,
                            int n, std::uint64_t seed) {
  const SerField field = build_ser_field(grid, scan.spec.range_max);
  return init_global_ser(grid, field, scan, n, seed);
}

ParticleSet init_global_ser(const OccupancyGrid& grid, const SerField& field,
                            const Scan& scan, int n, std::uint64_t seed) {
  if (field.free_cells.empty()) {
    throw std::runtime_error("init_global_ser: map has no Free cells");
  }
  // Scan signature: deciles of the sorted ranges, no-returns at range_max.
  std::vector<double> ranges;
  ranges.reserve(scan.ranges.size());
  std::size_t finite = 0;
  for (const double r : scan.ranges) {
    if (is_return(r)) {
      ranges.push_back(std::min(r, field.range_max));
      ++finite;
    } else {
      ranges.push_back(field.range_max);
    }
  }
  if (finite == 0 || ranges.size() < 8) {
    return init_global_uniform(grid, n, seed);
  }
  std::sort(ranges.begin(), ranges.end());
  // Order statistics at the octile midpoints, the plotting positions of a
  // sorted 8-sample; plain 10..80% deciles sit systematically below the
  // 8-bearing signature's support and wash out the region.
  std::array<double, 8> scan_sig{};
  for (int i = 0; i < 8; ++i) {
    const std::size_t idx = static_cast<std::size_t>(
        std::llround((i + 0.5) / 8.0 * (ranges.size() - 1)));
    scan_sig[i] = ranges[idx];
  }

  std::vector<double> dist(field.free_cells.size());
  for (std::size_t i = 0; i < field.free_cells.size(); ++i) {
    double d = 0.0;
    for (int k = 0; k < 8; ++k) {
      d += std::abs(field.signatures[i][k] - scan_sig[k]);
    }
    dist[i] = d;
  }
  std::vector<double> sorted = dist;
  std::sort(sorted.begin(), sorted.end());
  const double cutoff =
      sorted[static_cast<std::size_t>(0.1 * (sorted.size() - 1))];
  std::vector<std::size_t> ser;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] <= cutoff) ser.push_back(i);
  }
  if (ser.size() < static_cast<std::size_t>(std::max(1, n / 10))) {
    return init_global_uniform(grid, n, seed);
  }

  ParticleSet set;
  set.rng = Rng(seed);
  set.particles.reserve(n);
  for (int i = 0; i < n; ++i) {
    const std::size_t pick = ser[static_cast<std::size_t>(
        set.rng.uniform_int(0, static_cast<int>(ser.size()) - 1))];
    set.particles.push_back(
        {sample_in_cell(grid, field.free_cells[pick], set.rng), 1.0 / n});
  }
  return set;
}

PoseEstimate estimate_from(const ParticleSet& set) {
  PoseEstimate est;
  if (set.particles.empty()) return est;
  double sx = 0.0, sy = 0.0, sc = 0.0, ss = 0.0, wsum = 0.0;
  for (const Particle& p : set.particles) {
    sx += p.weight * p.pose.x;
    sy += p.weight * p.pose.y;
    sc += p.weight * std::cos(p.pose.theta);
    ss += p.weight * std::sin(p.pose.theta);
    wsum += p.weight;
  }
  if (wsum <= 0.0) return est;
  est.mean = Pose2(sx / wsum, sy / wsum, std::atan2(ss, sc));
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Particle& p : set.particles) {
    const double dx = p.pose.x - est.mean.x;
    const double dy = p.pose.y - est.mean.y;
    const double dt = normalize_angle(p.pose.theta - est.mean.theta);
    Eigen::Vector3d d(dx, dy, dt);
    cov += (p.weight / wsum) * d * d.transpose();
  }
  est.covariance = cov;
  return est;
}

bool converged(const PoseEstimate& est, double threshold) {
  const double a = est.covariance(0, 0);
  const double b = est.covariance(0, 1);
  const double c = est.covariance(1, 1);
  const double lam_max =
      (a + c) / 2.0 + std::sqrt((a - c) * (a - c) / 4.0 + b * b);
  return lam_max < threshold;
}

std::vector<int> low_variance_resample_indices(
    const std::vector<double>& weights, int n_out, Rng& rng) {
  std::vector<int> picks;
  picks.reserve(n_out);
  const int n = static_cast<int>(weights.size());
  const double r = rng.uniform() / n_out;
  double c = weights[0];
  int i = 0;
  for (int m = 0; m < n_out; ++m) {
    const double u = r + static_cast<double>(m) / n_out;
    while (u > c && i < n - 1) {
      ++i;
      c += weights[i];
    }
    picks.push_back(i);
  }
  return picks;
}

namespace {

int kld_target_size(const ParticleSet& set, const MclConfig& cfg) {
  std::unordered_set<std::uint64_t> bins;
  for (const Particle& p : set.particles) {
    const auto bx = static_cast<std::int64_t>(
        std::floor(p.pose.x / cfg.kld_bin_xy));
    const auto by = static_cast<std::int64_t>(
        std::floor(p.pose.y / cfg.kld_bin_xy));
    const auto bt = static_cast<std::int64_t>(
        std::floor((p.pose.theta + M_PI) / cfg.kld_bin_theta));
    std::uint64_t key = static_cast<std::uint64_t>(bx & 0x1fffff);
    key = key << 21 | static_cast<std::uint64_t>(by & 0x1fffff);
    key = key << 21 | static_cast<std::uint64_t>(bt & 0x1fffff);
    bins.insert(key);
  }
  const int k = static_cast<int>(bins.size());
  if (k <= 1) return cfg.n_min;
  const double z = probit(1.0 - cfg.kld_delta);
  const double a = 2.0 / (9.0 * (k - 1));
  const double bound = (k - 1) / (2.0 * cfg.kld_epsilon) *
                       std::pow(1.0 - a + std::sqrt(a) * z, 3.0);
  const int n = static_cast<int>(std::ceil(bound));
  return std::clamp(n, cfg.n_min, cfg.n_max);
}

}  // namespace

StepResult step(ParticleSet& set, const Pose2& odom_delta, const Scan& scan,
                const LikelihoodField& field, const MclConfig& cfg) {
  if (set.particles.empty()) throw std::runtime_error("step: empty particle set");
  StepResult result;

  // 1. Motion update.
  for (Particle& p : set.particles) {
    p.pose = p.pose.compose(
        sample_odometry_delta(odom_delta, cfg.motion_noise, set.rng));
  }

  // 2. Importance weighting in log space over every k-th finite beam.
  std::vector<double> logw(set.particles.size());
  double max_logw = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.particles.size(); ++i) {
    const Pose2& pose = set.particles[i].pose;
    double lw = std::log(set.particles[i].weight);
    for (int b = 0; b < scan.spec.n_beams; b += std::max(1, cfg.beam_skip)) {
      const double r = scan.ranges[b];
      if (!is_return(r)) continue;
      const double bearing = pose.theta + scan.spec.bearing(b);
      const Point2 endpoint{pose.x + r * std::cos(bearing),
                            pose.y + r * std::sin(bearing)};
      lw += std::log(field.probability_at(endpoint));
    }
    logw[i] = lw;
    max_logw = std::max(max_logw, lw);
  }

  double wsum = 0.0;
  if (std::isfinite(max_logw)) {
    for (std::size_t i = 0; i < set.particles.size(); ++i) {
      set.particles[i].weight = std::exp(logw[i] - max_logw);
      wsum += set.particles[i].weight;
    }
  }
  if (!(wsum > 0.0) || !std::isfinite(wsum)) {
    // Total underflow: reset to uniform and report divergence.
    for (Particle& p : set.particles) {
      p.weight = 1.0 / set.particles.size();
    }
    set.diverged = true;
    result.diverged = true;
  } else {
    for (Particle& p : set.particles) p.weight /= wsum;
  }

  result.estimate = estimate_from(set);

  // 3. Resampling, gated on the effective sample size.
  double sq_sum = 0.0;
  for (const Particle& p : set.particles) sq_sum += p.weight * p.weight;
  const double n_eff = 1.0 / sq_sum;
  result.n_eff = n_eff;
  const int n = static_cast<int>(set.particles.size());
  if (n_eff < cfg.resample_frac * n) {
    const int n_target = kld_target_size(set, cfg);
    std::vector<double> weights(set.particles.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
      weights[i] = set.particles[i].weight;
    }
    const std::vector<int> picks =
        low_variance_resample_indices(weights, n_target, set.rng);
    std::vector<Particle> next;
    next.reserve(picks.size());
    for (const int idx : picks) {
      next.push_back({set.particles[idx].pose, 1.0 / n_target});
    }
    set.particles = std::move(next);
    result.resampled = true;
  }
  result.n_particles = static_cast<int>(set.particles.size());
  return result;
}

}  // namespace gridgraph
