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

#include "gridgraph/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gridgraph {

RunMetrics evaluate(const Trajectory& estimate, const Trajectory& truth,
                    const EvaluateOptions& opts) {
  if (estimate.empty() || truth.empty()) {
    throw std::runtime_error("evaluate: empty trajectory");
  }

  // Associate every estimate with the nearest truth stamp within tolerance.
  struct Pair {
    double stamp;
    double trans_err;
    double rot_err;
  };
  std::vector<Pair> pairs;
  pairs.reserve(estimate.size());
  std::size_t cursor = 0;
  for (const TimedPose& est : estimate) {
    while (cursor + 1 < truth.size() &&
           std::abs(truth[cursor + 1].stamp - est.stamp) <=
               std::abs(truth[cursor].stamp - est.stamp)) {
      ++cursor;
    }
    // The cursor only moves forward; rewind one step if the previous truth
    // sample is closer (possible for unsorted-but-near stamps).
    std::size_t best = cursor;
    if (cursor > 0 && std::abs(truth[cursor - 1].stamp - est.stamp) <
                          std::abs(truth[cursor].stamp - est.stamp)) {
      best = cursor - 1;
    }
    if (std::abs(truth[best].stamp - est.stamp) > opts.association_tolerance) {
      continue;
    }
    const Pose2& t = truth[best].pose;
    const Pose2& e = est.pose;
    pairs.push_back({est.stamp, std::hypot(e.x - t.x, e.y - t.y),
                     std::abs(normalize_angle(e.theta - t.theta))});
  }
  if (pairs.empty()) {
    throw std::runtime_error("evaluate: no associable samples");
  }

  // Convergence: first sample from which the next `debounce` consecutive
  // associated samples all stay inside the radius (clamped to the samples
  // that exist).
  std::ptrdiff_t conv_index = -1;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::size_t window = std::min(
        static_cast<std::size_t>(opts.convergence_debounce), pairs.size() - i);
    bool ok = true;
    for (std::size_t j = i; j < i + window; ++j) {
      if (pairs[j].trans_err > opts.convergence_radius) {
        ok = false;
        break;
      }
    }
    if (ok) {
      conv_index = static_cast<std::ptrdiff_t>(i);
      break;
    }
  }

  RunMetrics metrics;
  const double t0 = truth.front().stamp;
  const double t1 = truth.back().stamp;
  const double deadline = t0 + opts.failure_fraction * (t1 - t0);
  if (conv_index < 0 || pairs[conv_index].stamp > deadline) {
    metrics.convergence_time_s.reset();
    return metrics;
  }
  metrics.convergence_time_s = pairs[conv_index].stamp - t0;

  double trans_sq = 0.0;
  double rot_sq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = static_cast<std::size_t>(conv_index); i < pairs.size();
       ++i) {
    trans_sq += pairs[i].trans_err * pairs[i].trans_err;
    rot_sq += pairs[i].rot_err * pairs[i].rot_err;
    ++n;
  }
  metrics.trans_rmse_cm = std::sqrt(trans_sq / n) * 100.0;
  metrics.rot_rmse_deg = std::sqrt(rot_sq / n) * 180.0 / M_PI;
  return metrics;
}

}  // namespace gridgraph
