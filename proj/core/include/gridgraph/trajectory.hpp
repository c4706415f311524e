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

#ifndef GRIDGRAPH_TRAJECTORY_HPP
#define GRIDGRAPH_TRAJECTORY_HPP

#include <string>
#include <vector>

#include "gridgraph/pose2.hpp"

namespace gridgraph {

struct TimedPose {
  double stamp = 0.0;
  Pose2 pose;
};

using Trajectory = std::vector<TimedPose>;

// TUM trajectory text: `timestamp tx ty tz qx qy qz qw`, one line per pose,
// z = 0 and the quaternion encodes the yaw.
std::string trajectory_to_tum(const Trajectory& traj);
Trajectory trajectory_from_tum(const std::string& text);

void save_tum(const Trajectory& traj, const std::string& path);
Trajectory load_tum(const std::string& path);

}  // namespace gridgraph

#endif  // GRIDGRAPH_TRAJECTORY_HPP
