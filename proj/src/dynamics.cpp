// Copyright 2026 The coragp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coragp/dynamics.hpp"

#include <Eigen/Cholesky>

#include <cmath>

#include "coragp/error.hpp"

namespace coragp::dynamics {

void ELParams::validate() const {
  require(mass1 > 0.0 && mass2 > 0.0, "manipulator: masses must be positive");
  require(length1 > 0.0 && length2 > 0.0, "manipulator: link lengths must be positive");
  require(gravity >= 0.0, "manipulator: gravity must be nonnegative");
}

Mat2 inertia(const Vec2& q, const ELParams& p) {
  const double c2 = std::cos(q[1]);
  const double cross = p.mass2 * p.length1 * p.length2 * c2;
  Mat2 h;
  h(0, 0) = (p.mass1 + p.mass2) * p.length1 * p.length1 + p.mass2 * p.length2 * p.length2 + 2.0 * cross;
  h(0, 1) = p.mass2 * p.length2 * p.length2 + cross;
  h(1, 0) = h(0, 1);
  h(1, 1) = p.mass2 * p.length2 * p.length2;
  return h;
}

Mat2 coriolis(const Vec2& q, const Vec2& qdot, const ELParams& p) {
  const double h = -p.mass2 * p.length1 * p.length2 * std::sin(q[1]);
  Mat2 c;
  c << h * qdot[1], h * (qdot[0] + qdot[1]),
      -h * qdot[0], 0.0;
  return c;
}

Vec2 gravity(const Vec2& q, const ELParams& p) {
  const double c1 = std::cos(q[0]);
  const double c12 = std::cos(q[0] + q[1]);
  return {(p.mass1 + p.mass2) * p.gravity * p.length1 * c1 + p.mass2 * p.gravity * p.length2 * c12,
          p.mass2 * p.gravity * p.length2 * c12};
}

double kinetic_energy(const AgentState& s, const ELParams& params) {
  return 0.5 * s.qdot.dot(inertia(s.q, params) * s.qdot);
}

double potential_energy(const Vec2& q, const ELParams& p) {
  const double y1 = p.length1 * std::sin(q[0]);
  const double y2 = y1 + p.length2 * std::sin(q[0] + q[1]);
  return p.gravity * (p.mass1 * y1 + p.mass2 * y2);
}

Vec2 unknown_f(const Vec2& q, const Vec2& /*qdot*/) {
  return {q[1] * std::sin(4.0 * q[1]) + std::cos(q[0]), q[1] * std::sin(0.2 * q[0] * q[0]) + std::cos(q[0])};
}

Vec2 forward_dynamics(const AgentState& s, const Vec2& u, const ELParams& params, const Vec2& disturbance) {
  const Vec2 rhs = u - coriolis(s.q, s.qdot, params) * s.qdot - gravity(s.q, params) - disturbance;
  return inertia(s.q, params).llt().solve(rhs);
}

LeaderState LeaderTrajectory::at(double t) const {
  const double c = std::cos(angular_rate * t);
  const double s = std::sin(angular_rate * t);
  const double w = angular_rate;
  return {Vec2(radius * c, -radius * s), Vec2(-radius * w * s, -radius * w * c),
          Vec2(-radius * w * w * c, radius * w * w * s)};
}

}  // namespace coragp::dynamics
