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

#ifndef GRIDGRAPH_MCL_HPP
#define GRIDGRAPH_MCL_HPP

#include <Eigen/Core>
#include <array>
#include <vector>

#include "gridgraph/sequence.hpp"

namespace gridgraph {

struct Particle {
  Pose2 pose;
  double weight = 0.0;
};

struct ParticleSet {
  std::vector<Particle> particles;
  Rng rng{0};
  bool diverged = false;
};

struct PoseEstimate {
  Pose2 mean;  // circular mean for theta
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
};

// Distance-to-nearest-Occupied field with the standard beam-endpoint
// probability p = z_hit * exp(-d^2 / (2 sigma_hit^2)) + z_rand / range_max.
// Immutable and shared across filter instances.
class LikelihoodField {
 public:
  LikelihoodField(const OccupancyGrid& grid, double sigma_hit = 0.2,
                  double z_hit = 0.95, double z_rand = 0.05,
                  double d_max = 2.0, double range_max = 10.0);

  double distance_at(const Point2& world) const;
  double probability_at(const Point2& world) const;
  double min_probability() const { return z_rand_ / range_max_; }
  const OccupancyGrid& grid() const { return grid_; }

 private:
  OccupancyGrid grid_;
  std::vector<float> distance_;  // meters, capped at d_max
  double sigma_hit_;
  double z_hit_;
  double z_rand_;
  double d_max_;
  double range_max_;
};

struct MclConfig {
  int n_min = 100;
  int n_max = 2000;
  double resample_frac = 0.5;  // resample when N_eff < frac * N
  OdomNoise motion_noise{0.05, 0.05, 0.02, 0.02};
  int beam_skip = 10;  // weight every k-th beam
  // KLD-style adaptive sizing.
  double kld_epsilon = 0.05;
  double kld_delta = 0.01;
  double kld_bin_xy = 0.5;            // m
  double kld_bin_theta = M_PI / 8.0;  // rad
  double convergence_threshold = 0.05;  // m^2, positional covariance gate
};

struct StepResult {
  PoseEstimate estimate;
  int n_particles = 0;
  double n_eff = 0.0;
  bool resampled = false;
  bool diverged = false;
};

// Gaussian cloud around pose0; particles landing on non-Free cells are
// redrawn up to 100 times, then kept.
ParticleSet init_tracking(const OccupancyGrid& grid, const Pose2& pose0,
                          const std::array<double, 3>& sigma, int n,
                          std::uint64_t seed);

// Uniform over all Free cells with uniform headings.
ParticleSet init_global_uniform(const OccupancyGrid& grid, int n,
                                std::uint64_t seed);

// Sorted 8-bearing expected ranges per Free cell; cells whose signature is
// close to the scan's form the similar-energy region the particles are
// spread over.
struct SerField {
  std::vector<CellIndex> free_cells;
  std::vector<std::array<float, 8>> signatures;
  double range_max = 10.0;
};

SerField build_ser_field(const OccupancyGrid& grid, double range_max);

// Particles sampled uniformly over the best-decile similar-energy cells.
// Falls back to uniform-over-Free when the scan carries no finite ranges or
// the region would be smaller than n/10 cells.
ParticleSet init_global_ser(const OccupancyGrid& grid, const Scan& scan,
                            int n, std::uint64_t seed);
ParticleSet init_global_ser(const OccupancyGrid& grid, const SerField& field,
                            const Scan& scan, int n, std::uint64_t seed);

// One motion + weighting (+ low-variance resampling with KLD-style
// population sizing) cycle. The estimate is computed after weighting.
StepResult step(ParticleSet& set, const Pose2& odom_delta, const Scan& scan,
                const LikelihoodField& field, const MclConfig& cfg);

// Covariance gate: max eigenvalue of the positional 2x2 block below the
// threshold.
bool converged(const PoseEstimate& est, double threshold = 0.05);

PoseEstimate estimate_from(const ParticleSet& set);

// Exposed for the resampler's statistical unit test.
std::vector<int> low_variance_resample_indices(
    const std::vector<double>& weights, int n_out, Rng& rng);

}  // namespace gridgraph

#endif  // GRIDGRAPH_MCL_HPP
