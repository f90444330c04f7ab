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

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <random>
#include <vector>

#include "coragp/config.hpp"
#include "coragp/control.hpp"
#include "support.hpp"

using namespace coragp::control;
using coragp::dynamics::ELParams;
using coragp::testing::uniform;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

coragp::topology::Digraph first_graph() {
  MatrixXd a = MatrixXd::Zero(4, 4);
  for (auto [x, y] : {std::pair{1, 3}, {2, 3}, {2, 4}}) a(x - 1, y - 1) = a(y - 1, x - 1) = 1.0;
  VectorXd l = VectorXd::Zero(4);
  l[1] = 1.0;
  return coragp::topology::Digraph("G1", a, l);
}

std::vector<AgentState> random_states(std::mt19937_64& rng, int n) {
  std::vector<AgentState> out(static_cast<std::size_t>(n));
  for (auto& s : out) {
    s.q = uniform(rng, 2, 1, -1.5, 1.5);
    s.qdot = uniform(rng, 2, 1, -1, 1);
  }
  return out;
}

LeaderState random_leader(std::mt19937_64& rng) {
  return LeaderState{uniform(rng, 2, 1), uniform(rng, 2, 1), uniform(rng, 2, 1)};
}

}  // namespace

TEST_CASE("sync error: consensus fixed point and the single-leader case") {
  std::mt19937_64 rng(1);
  const auto g = first_graph();
  const LeaderState leader = random_leader(rng);
  std::vector<AgentState> at_leader(4, AgentState{leader.q, leader.qdot});
  for (std::size_t i = 0; i < 4; ++i) CHECK(sync_error(i, at_leader, leader, g, 2.0).nu.norm() == 0.0);

  MatrixXd a = MatrixXd::Zero(1, 1);
  VectorXd l = VectorXd::Ones(1);
  const auto solo = coragp::topology::Digraph("solo", a, l);
  const auto states = random_states(rng, 1);
  const SyncError e = sync_error(0, states, leader, solo, 1.7);
  CHECK(e.nu.isApprox(1.7 * (leader.q - states[0].q) + (leader.qdot - states[0].qdot)));
}

TEST_CASE("sync error: matches the stacked Laplacian form") {
  std::mt19937_64 rng(2);
  const auto g = first_graph();
  const MatrixXd lk = Eigen::kroneckerProduct(coragp::topology::follower_laplacian(g), MatrixXd::Identity(2, 2));
  for (int trial = 0; trial < 50; ++trial) {
    const auto states = random_states(rng, 4);
    const LeaderState leader = random_leader(rng);
    VectorXd q(8), qd(8);
    for (int i = 0; i < 4; ++i) {
      q.segment<2>(2 * i) = states[static_cast<std::size_t>(i)].q - leader.q;
      qd.segment<2>(2 * i) = states[static_cast<std::size_t>(i)].qdot - leader.qdot;
    }
    const double alpha = 0.5 + uniform(rng, 1, 1, 0, 3)(0, 0);
    const VectorXd dq = -lk * q;
    const VectorXd nu = alpha * dq - lk * qd;
    for (std::size_t i = 0; i < 4; ++i) {
      const SyncError e = sync_error(i, states, leader, g, alpha);
      CHECK((e.nu - nu.segment<2>(2 * static_cast<Eigen::Index>(i))).norm() <= 1e-12);
      // Stacked identity: dqdot = nu - alpha dq.
      CHECK((e.dqdot - (e.nu - alpha * e.dq)).norm() <= 1e-12);
    }
  }
}

TEST_CASE("sync error: locality under non-neighbor perturbation") {
  std::mt19937_64 rng(3);
  const auto g = first_graph();
  for (int trial = 0; trial < 200; ++trial) {
    auto states = random_states(rng, 4);
    LeaderState leader = random_leader(rng);
    for (std::size_t i = 0; i < 4; ++i) {
      const SyncError base = sync_error(i, states, leader, g, 2.0);
      auto perturbed = states;
      for (std::size_t j = 0; j < 4; ++j) {
        if (j != i && g.adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == 0.0) {
          perturbed[j].q += uniform(rng, 2, 1);
          perturbed[j].qdot += uniform(rng, 2, 1);
        }
      }
      LeaderState moved = leader;
      if (g.leader_links[static_cast<Eigen::Index>(i)] == 0.0) moved.q += uniform(rng, 2, 1);
      const SyncError after = sync_error(i, perturbed, moved, g, 2.0);
      CHECK(after.nu == base.nu);
    }
  }
}

TEST_CASE("control input: exact cancellation gives qddot = c nu") {
  const ELParams p;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    AgentState s{uniform(rng, 2, 1, -3, 3), uniform(rng, 2, 1, -2, 2)};
    const Vec2 nu = uniform(rng, 2, 1, -3, 3);
    const double c = 0.5 + uniform(rng, 1, 1, 0, 5)(0, 0);
    const Vec2 f = coragp::dynamics::unknown_f(s.q, s.qdot);
    const Vec2 u = control_input(s, nu, f, p, c);
    CHECK((coragp::dynamics::forward_dynamics(s, u, p, f) - c * nu).norm() <= 1e-9);
    // Affine in nu with coefficient c H(q).
    const Vec2 u0 = control_input(s, Vec2::Zero(), f, p, c);
    CHECK(((u - u0) - c * coragp::dynamics::inertia(s.q, p) * nu).norm() <= 1e-12);
  }
}

TEST_CASE("positive definiteness: minor test agrees with eigenvalues") {
  std::mt19937_64 rng(5);
  int pd = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    const VectorXd v = uniform(rng, 3, 1, -3, 3);
    Mat2 m;
    m << v[0], v[1], v[1], v[2];
    const Eigen::SelfAdjointEigenSolver<Mat2> eig(m);
    const bool expected = eig.eigenvalues().minCoeff() > 0.0;
    CHECK(is_positive_definite(m) == expected);
    pd += expected;
  }
  CHECK(pd > 100);
}

TEST_CASE("inertia grid: planar arm reaches its smallest top singular value at a folded elbow") {
  const ELParams p;
  // sigma_max(H) is minimal at q2 = +-pi, where H = diag(1, 1) for unit links and masses.
  CHECK(min_inertia_max_singular_value(p, WorkspaceGrid{}) == doctest::Approx(1.0).epsilon(1e-12));
  const double coarse = min_inertia_max_singular_value(p, WorkspaceGrid{7, -1.0, 1.0});
  CHECK(coarse > 1.0);
}

TEST_CASE("theorem check: report on the shipped preset and the large-alpha case") {
  const auto config = coragp::sim::load_config(coragp::testing::preset("paperV.preset"));
  const coragp::topology::TopologyEnsemble ensemble(config.topology.graphs);
  const BoundReport r = theorem1_check(ensemble, config.gains, 2, 1.0, 0.5, 0.05);
  CHECK(r.phi1(0, 1) == doctest::Approx(-2.5));
  CHECK(r.phi1(1, 1) == doctest::Approx(2.0));
  CHECK(r.phi1(0, 0) == doctest::Approx(r.min_shifted_singular));
  CHECK(std::isfinite(r.error_bound));
  CHECK(r.error_bound > 0.0);
  // Transcription of the bound from its ingredients.
  const double phi2 = r.max_laplacian_singular * (0.5 / 1.0 + 2.0 * 0.05);
  CHECK(r.phi2_norm == doctest::Approx(phi2).epsilon(1e-14));
  const Eigen::SelfAdjointEigenSolver<Mat2> eig(r.phi1);
  const double smin = eig.eigenvalues().cwiseAbs().minCoeff();
  CHECK(r.error_bound ==
        doctest::Approx(3.0 * phi2 / (2.0 * r.min_laplacian_singular * std::sqrt(smin + 0.5))).epsilon(1e-14));
  CHECK(r.ultimate_bound == doctest::Approx(phi2 * phi2 / (2.0 * (smin + 0.5))).epsilon(1e-14));

  ControlGains huge = config.gains;
  huge.alpha = 1e3;
  const BoundReport bad = theorem1_check(ensemble, huge, 2, 1.0, 0.5, 0.05);
  CHECK_FALSE(bad.is_pd);
}
