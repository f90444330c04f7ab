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

#include <cstddef>
#include <span>

#include "coragp/dynamics.hpp"
#include "coragp/topology.hpp"

namespace coragp::control {

using dynamics::AgentState;
using dynamics::LeaderState;
using dynamics::Mat2;
using dynamics::Vec2;

struct ControlGains {
  double alpha = 2.0;
  Eigen::VectorXd c = Eigen::VectorXd::Constant(4, 2.0);
  double sigma_g = 0.15;

  void validate(Eigen::Index agents) const;
};

struct SyncError {
  Vec2 nu = Vec2::Zero();
  Vec2 dq = Vec2::Zero();     // sum_j a_ij (q_j - q_i), j = 0 is the leader
  Vec2 dqdot = Vec2::Zero();
};

/// Neighborhood disagreement of agent i under the given graph. Reads only
/// the states of i, of its in-neighbors and (if a_i0 > 0) of the leader.
SyncError sync_error(std::size_t i, std::span<const AgentState> followers, const LeaderState& leader,
                     const topology::Digraph& graph, double alpha);

/// Feedback-linearizing input u = c_i H nu + C qdot + g + fhat, where fhat
/// estimates the disturbance f entering H qddot + C qdot + g + f = u.
Vec2 control_input(const AgentState& state, const Vec2& nu, const Vec2& fhat, const dynamics::ELParams& params,
                   double c_i);

/// Leading-principal-minor test for a symmetric 2x2 matrix.
bool is_positive_definite(const Mat2& m);

struct WorkspaceGrid {
  int points = 50;
  double low = -3.14159265358979323846;
  double high = 3.14159265358979323846;
};

/// min over a square grid of q of the largest singular value of H(q).
double min_inertia_max_singular_value(const dynamics::ELParams& params, const WorkspaceGrid& grid);

struct BoundReport {
  Mat2 phi1 = Mat2::Zero();
  bool is_pd = false;
  double phi1_min_singular = 0.0;
  double phi2_norm = 0.0;
  double error_bound = 0.0;       // tracking-error bound on ||e_bar||
  double ultimate_bound = 0.0;    // ||Phi2||^2 / (2 (sigma_min(Phi1) + 1/2)), bound on V
  double min_shifted_singular = 0.0;  // min_r sigma_min(c L~_r - alpha I)
  double min_laplacian_singular = 0.0;
  double max_laplacian_singular = 0.0;
  double min_inertia_max_singular = 0.0;
  double eta_tilde = 0.0;
  double leader_speed_bound = 0.0;
};

/// Sufficient stability condition and ultimate tracking-error bound of the
/// switched closed loop. Never throws on a failed condition; is_pd reports it.
BoundReport theorem1_check(const topology::TopologyEnsemble& ensemble, const ControlGains& gains, int state_dim,
                           double min_inertia_max_singular, double eta_tilde, double leader_speed_bound);

}  // namespace coragp::control
