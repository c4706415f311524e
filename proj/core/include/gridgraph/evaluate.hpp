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

#ifndef GRIDGRAPH_EVALUATE_HPP
#define GRIDGRAPH_EVALUATE_HPP

#include <optional>
#include <string>

#include "gridgraph/trajectory.hpp"

namespace gridgraph {

struct RunMetrics {
  double trans_rmse_cm = 0.0;
  double rot_rmse_deg = 0.0;
  std::optional<double> convergence_time_s;  // absent on failure
  std::uint64_t run_seed = 0;
  std::string method;
  std::string scenario;

  bool failed() const { return !convergence_time_s.has_value(); }
};

struct EvaluateOptions {
  double association_tolerance = 0.05;  // s
  double convergence_radius = 0.5;      // m
  int convergence_debounce = 5;         // consecutive in-radius samples
  double failure_fraction = 0.95;       // convergence must happen in this part
};

// Associates estimates to the nearest ground-truth stamp, finds the first
// estimate from which the next `convergence_debounce` consecutive samples
// stay within the radius, and computes post-convergence translational and
// wrapped angular RMSE. No convergence within the first 95% of the sequence
// counts as failure.
RunMetrics evaluate(const Trajectory& estimate, const Trajectory& truth,
                    const EvaluateOptions& opts = EvaluateOptions{});

}  // namespace gridgraph

#endif  // GRIDGRAPH_EVALUATE_HPP
