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

#pragma once

#include <Eigen/Core>

#include <cmath>

namespace coragp::dynamics {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Planar two-link manipulator with point masses at the link tips.
struct ELParams {
  double mass1 = 1.0;
  double mass2 = 1.0;
  double length1 = 1.0;
  double length2 = 1.0;
  double gravity = 9.81;  // may be 0 for a gravity-free ablation

  void validate() const;
};

struct AgentState {
  Vec2 q = Vec2::Zero();
  Vec2 qdot = Vec2::Zero();

  bool finite() const { return q.allFinite() && qdot.allFinite(); }
};

Mat2 inertia(const Vec2& q, const ELParams& params);
/// Christoffel-consistent Coriolis matrix: Hdot - 2C is skew-symmetric.
Mat2 coriolis(const Vec2& q, const Vec2& qdot, const ELParams& params);
Vec2 gravity(const Vec2& q, const ELParams& params);

double kinetic_energy(const AgentState& s, const ELParams& params);
double potential_energy(const Vec2& q, const ELParams& params);

/// Unknown disturbance of the benchmark:
///   f = [q2 sin(4 q2) + cos(q1), q2 sin(0.2 q1^2) + cos(q1)].
/// Depends on q only; qdot is accepted for interface uniformity.
Vec2 unknown_f(const Vec2& q, const Vec2& qdot);

/// qddot = H^-1 (u - C qdot - g - f).
Vec2 forward_dynamics(const AgentState& s, const Vec2& u, const ELParams& params, const Vec2& disturbance);

struct LeaderState {
  Vec2 q;
  Vec2 qdot;
  Vec2 qddot;
};

/// Circular reference q0(t) = (R cos(w t), -R sin(w t)).
struct LeaderTrajectory {
  double radius = 0.8;
  double angular_rate = 0.02 * 3.14159265358979323846;

  LeaderState at(double t) const;
  /// Bound on ||q0dot(t)||.
  double peak_speed() const { return radius * std::abs(angular_rate); }
};

}  // namespace coragp::dynamics
