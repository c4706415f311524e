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

#include "gridgraph/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gridgraph {

std::string trajectory_to_tum(const Trajectory& traj) {
  std::string out;
  char buf[256];
  for (const TimedPose& tp : traj) {
    const double qz = std::sin(tp.pose.theta / 2.0);
    const double qw = std::cos(tp.pose.theta / 2.0);
    std::snprintf(buf, sizeof(buf),
                  "%.9f %.9f %.9f 0.000000000 0.000000000 0.000000000 %.9f "
                  "%.9f\n",
                  tp.stamp, tp.pose.x, tp.pose.y, qz, qw);
    out += buf;
  }
  return out;
}

Trajectory trajectory_from_tum(const std::string& text) {
  Trajectory traj;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double t, tx, ty, tz, qx, qy, qz, qw;
    if (!(ls >> t >> tx >> ty >> tz >> qx >> qy >> qz >> qw)) {
      throw std::runtime_error("TUM trajectory: malformed line '" + line + "'");
    }
    const double yaw = std::atan2(2.0 * (qw * qz + qx * qy),
                                  1.0 - 2.0 * (qy * qy + qz * qz));
    traj.push_back({t, Pose2(tx, ty, yaw)});
  }
  return traj;
}

void save_tum(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << trajectory_to_tum(traj);
}

Trajectory load_tum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return trajectory_from_tum(ss.str());
}

}  // namespace gridgraph
