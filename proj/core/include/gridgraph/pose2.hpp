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

#ifndef GRIDGRAPH_POSE2_HPP
#define GRIDGRAPH_POSE2_HPP

#include <cmath>

namespace gridgraph {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double normalize_angle(double theta) {
  // Maps to (-pi, pi]; remainder() yields [-pi, pi].
  double a = std::remainder(theta, 2.0 * M_PI);
  if (a <= -M_PI) a = M_PI;
  return a;
}

// Planar pose [x, y, theta]. theta is kept in (-pi, pi] by construction
// and by every composition operation.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2() = default;
  Pose2(double x_, double y_, double theta_)
      : x(x_), y(y_), theta(normalize_angle(theta_)) {}

  // this * other, i.e. 'other' expressed in this pose's frame mapped to the
  // parent frame.
  Pose2 compose(const Pose2& other) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return Pose2(x + c * other.x - s * other.y, y + s * other.x + c * other.y,
                 theta + other.theta);
  }

  Pose2 inverse() const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return Pose2(-c * x - s * y, s * x - c * y, -theta);
  }

  // this^-1 * to: the relative transform taking this pose to 'to'.
  Pose2 between(const Pose2& to) const { return inverse().compose(to); }

  Point2 transform(const Point2& p) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {x + c * p.x - s * p.y, y + s * p.x + c * p.y};
  }

  Point2 position() const { return {x, y}; }
};

inline bool approx_equal(const Pose2& a, const Pose2& b, double tol = 1e-9) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol &&
         std::abs(normalize_angle(a.theta - b.theta)) <= tol;
}

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace gridgraph

#endif  // GRIDGRAPH_POSE2_HPP
