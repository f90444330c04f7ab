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

#include "coragp/control.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>

#include "coragp/error.hpp"

namespace coragp::control {

void ControlGains::validate(Eigen::Index agents) const {
  require(alpha > 0.0, "gains: alpha must be positive");
  require(c.size() == agents, "gains: one c_i per agent is required");
  require((c.array() > 0.0).all(), "gains: every c_i must be positive");
  require(sigma_g > 0.0, "gains: sigma_g must be positive");
}

SyncError sync_error(std::size_t i, std::span<const AgentState> followers, const LeaderState& leader,
                     const topology::Digraph& graph, double alpha) {
  const auto n = static_cast<std::size_t>(graph.size());
  require(followers.size() == n && i < n, "sync_error: agent index or state count mismatch");
  const auto ii = static_cast<Eigen::Index>(i);
  const AgentState& self = followers[i];
  SyncError out;
  const double a0 = graph.leader_links[ii];
  if (a0 > 0.0) {
    out.dq += a0 * (leader.q - self.q);
    out.dqdot += a0 * (leader.qdot - self.qdot);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double a = graph.adjacency(ii, static_cast<Eigen::Index>(j));
    if (a <= 0.0) continue;
    out.dq += a * (followers[j].q - self.q);
    out.dqdot += a * (followers[j].qdot - self.qdot);
  }
  out.nu = alpha * out.dq + out.dqdot;
  return out;
}

Vec2 control_input(const AgentState& state, const Vec2& nu, const Vec2& fhat, const dynamics::ELParams& params,
                   double c_i) {
  return c_i * (dynamics::inertia(state.q, params) * nu) + dynamics::coriolis(state.q, state.qdot, params) * state.qdot +
         dynamics::gravity(state.q, params) + fhat;
}

bool is_positive_definite(const Mat2& m) { return m(0, 0) > 0.0 && m.determinant() > 0.0; }

double min_inertia_max_singular_value(const dynamics::ELParams& params, const WorkspaceGrid& grid) {
  require(grid.points >= 1 && grid.high >= grid.low, "workspace grid: invalid range");
  double best = std::numeric_limits<double>::infinity();
  const double step = grid.points > 1 ? (grid.high - grid.low) / (grid.points - 1) : 0.0;
  for (int a = 0; a < grid.points; ++a) {
    for (int b = 0; b < grid.points; ++b) {
      const Vec2 q(grid.low + a * step, grid.low + b * step);
      // H is symmetric positive definite, so its singular values are its eigenvalues.
      Eigen::SelfAdjointEigenSolver<Mat2> eig(dynamics::inertia(q, params), Eigen::EigenvaluesOnly);
      best = std::min(best, eig.eigenvalues().maxCoeff());
    }
  }
  return best;
}

BoundReport theorem1_check(const topology::TopologyEnsemble& ensemble, const ControlGains& gains, int state_dim,
                           double min_inertia_max_singular, double eta_tilde, double leader_speed_bound) {
  const Eigen::Index n = ensemble.agents();
  gains.validate(n);
  require(state_dim >= 1, "theorem1_check: state dimension must be positive");
  require(min_inertia_max_singular > 0.0, "theorem1_check: inertia singular value must be positive");
  const Eigen::Index nm = n * state_dim;

  Eigen::MatrixXd gain_blocks = Eigen::MatrixXd::Zero(nm, nm);
  for (Eigen::Index i = 0; i < n; ++i) {
    gain_blocks.block(i * state_dim, i * state_dim, state_dim, state_dim).diagonal().setConstant(gains.c[i]);
  }

  BoundReport report;
  report.min_shifted_singular = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < ensemble.size(); ++r) {
    const Eigen::MatrixXd kron =
        Eigen::kroneckerProduct(ensemble.laplacian(r), Eigen::MatrixXd::Identity(state_dim, state_dim));
    const Eigen::MatrixXd shifted = gain_blocks * kron - gains.alpha * Eigen::MatrixXd::Identity(nm, nm);
    report.min_shifted_singular = std::min(report.min_shifted_singular, topology::singular_range(shifted).min);
  }
  report.min_laplacian_singular = ensemble.min_laplacian_singular_value();
  report.max_laplacian_singular = ensemble.max_laplacian_singular_value();
  report.min_inertia_max_singular = min_inertia_max_singular;
  report.eta_tilde = eta_tilde;
  report.leader_speed_bound = leader_speed_bound;

  const double off = -(1.0 + gains.alpha * gains.alpha) / 2.0;
  report.phi1 << report.min_shifted_singular, off, off, gains.alpha;
  report.is_pd = is_positive_definite(report.phi1);
  Eigen::SelfAdjointEigenSolver<Mat2> eig(report.phi1, Eigen::EigenvaluesOnly);
  report.phi1_min_singular = eig.eigenvalues().cwiseAbs().minCoeff();

  // Phi2 = [max_r sigma_max(L~_r) (eta~ / min_q sigma_max(H) + sqrt(n) fbar), 0].
  report.phi2_norm = report.max_laplacian_singular *
                     (eta_tilde / min_inertia_max_singular + std::sqrt(static_cast<double>(n)) * leader_speed_bound);
  const double decay = report.phi1_min_singular + 0.5;
  report.error_bound =
      (1.0 + gains.alpha) * report.phi2_norm / (2.0 * report.min_laplacian_singular * std::sqrt(decay));
  report.ultimate_bound = report.phi2_norm * report.phi2_norm / (2.0 * decay);
  return report;
}

}  // namespace coragp::control
