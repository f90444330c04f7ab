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

#include "coragp/topology.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "coragp/error.hpp"

namespace coragp::topology {

Digraph::Digraph(std::string name_, Matrix adjacency_, Vector leader_links_)
    : name(std::move(name_)), adjacency(std::move(adjacency_)), leader_links(std::move(leader_links_)) {
  require(adjacency.rows() == adjacency.cols(), "digraph: adjacency must be square");
  require(adjacency.rows() >= 1, "digraph: at least one follower is required");
  require(leader_links.size() == adjacency.rows(), "digraph: leader link vector has wrong length");
  require((adjacency.array() >= 0.0).all() && (leader_links.array() >= 0.0).all(),
          "digraph: edge weights must be nonnegative");
  require((adjacency.diagonal().array() == 0.0).all(), "digraph: adjacency diagonal must be zero");
}

Matrix Digraph::self_looped() const {
  Matrix out = (adjacency.array() > 0.0).cast<double>();
  out.diagonal().setOnes();
  return out;
}

Vector Digraph::self_looped_row(Eigen::Index i) const {
  Vector row = (adjacency.row(i).array() > 0.0).cast<double>().transpose();
  row[i] = 1.0;
  return row;
}

Matrix follower_laplacian(const Digraph& graph) {
  Matrix lap = -graph.adjacency;
  lap.diagonal() = graph.adjacency.rowwise().sum() + graph.leader_links;
  return lap;
}

std::vector<Eigen::Index> unreachable_followers(const Digraph& graph) {
  const Eigen::Index n = graph.size();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::deque<Eigen::Index> frontier;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (graph.leader_links[i] > 0.0) {
      seen[static_cast<std::size_t>(i)] = true;
      frontier.push_back(i);
    }
  }
  // Information flows j -> i when adjacency(i, j) > 0.
  while (!frontier.empty()) {
    const Eigen::Index j = frontier.front();
    frontier.pop_front();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!seen[static_cast<std::size_t>(i)] && graph.adjacency(i, j) > 0.0) {
        seen[static_cast<std::size_t>(i)] = true;
        frontier.push_back(i);
      }
    }
  }
  std::vector<Eigen::Index> missing;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!seen[static_cast<std::size_t>(i)]) missing.push_back(i);
  }
  return missing;
}

bool has_leader_rooted_spanning_tree(const Digraph& graph) { return unreachable_followers(graph).empty(); }

bool is_irreducible(const Matrix& transition) {
  require(transition.rows() == transition.cols(), "is_irreducible: matrix must be square");
  const Eigen::Index n = transition.rows();
  if (n == 0) return false;
  auto reaches_all = [&](bool forward) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::deque<Eigen::Index> frontier{0};
    seen[0] = true;
    while (!frontier.empty()) {
      const Eigen::Index a = frontier.front();
      frontier.pop_front();
      for (Eigen::Index b = 0; b < n; ++b) {
        const double p = forward ? transition(a, b) : transition(b, a);
        if (p > 0.0 && !seen[static_cast<std::size_t>(b)]) {
          seen[static_cast<std::size_t>(b)] = true;
          frontier.push_back(b);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
  };
  return reaches_all(true) && reaches_all(false);
}

SingularRange singular_range(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.transpose() * m, Eigen::EigenvaluesOnly);
  const Vector ev = solver.eigenvalues().cwiseMax(0.0);
  return {std::sqrt(ev.minCoeff()), std::sqrt(ev.maxCoeff())};
}

TopologyEnsemble::TopologyEnsemble(std::vector<Digraph> graphs) : graphs_(std::move(graphs)) {
  if (graphs_.empty()) throw ValidationError("topology ensemble is empty");
  const Eigen::Index n = graphs_.front().size();
  for (const Digraph& g : graphs_) {
    if (g.size() != n) throw ValidationError("graph '" + g.name + "' has a different agent count");
    const auto missing = unreachable_followers(g);
    if (!missing.empty()) {
      std::ostringstream msg;
      msg << "Assumption 1 violated (leader-rooted spanning tree): graph '" << g.name
          << "' leaves follower(s)";
      for (Eigen::Index i : missing) msg << ' ' << (i + 1);
      msg << " unreachable from the leader";
      throw ValidationError(msg.str());
    }
    laplacians_.push_back(follower_laplacian(g));
    self_looped_.push_back(g.self_looped());
    spectra_.push_back(singular_range(laplacians_.back()));
    if (!(spectra_.back().min > 0.0)) {
      throw ValidationError("graph '" + g.name + "' has a singular follower Laplacian");
    }
  }
}

double TopologyEnsemble::min_laplacian_singular_value() const {
  double v = spectra_.front().min;
  for (const auto& s : spectra_) v = std::min(v, s.min);
  return v;
}

double TopologyEnsemble::max_laplacian_singular_value() const {
  double v = spectra_.front().max;
  for (const auto& s : spectra_) v = std::max(v, s.max);
  return v;
}

void validate_transition_matrix(const Matrix& transition, double tol) {
  if (transition.rows() != transition.cols() || transition.rows() < 2) {
    throw ValidationError("transition matrix must be square with at least two states");
  }
  for (Eigen::Index r = 0; r < transition.rows(); ++r) {
    std::ostringstream where;
    where << "transition matrix row " << (r + 1);
    if ((transition.row(r).array() < 0.0).any()) throw ValidationError(where.str() + " has negative entries");
    if (transition(r, r) != 0.0) throw ValidationError(where.str() + " has a nonzero diagonal entry");
    const double sum = transition.row(r).sum();
    if (std::abs(sum - 1.0) > tol) {
      where << " sums to " << sum << " instead of 1";
      throw ValidationError(where.str());
    }
  }
  if (!is_irreducible(transition)) {
    throw ValidationError("Assumption 2 violated (irreducible jump chain): transition matrix is reducible");
  }
}

namespace {

int sample_index(std::mt19937_64& rng, const Eigen::Ref<const Vector>& weights) {
  std::discrete_distribution<int> pick(weights.data(), weights.data() + weights.size());
  return pick(rng);
}

}  // namespace

SemiMarkovSwitcher::SemiMarkovSwitcher(Matrix transition, double rate, Vector initial_distribution,
                                       std::uint64_t seed)
    : transition_(std::move(transition)), rate_(rate), rng_(seed) {
  validate_transition_matrix(transition_);
  require(rate_ > 0.0 && std::isfinite(rate_), "switcher: sojourn rate must be positive");
  require(initial_distribution.size() == transition_.rows(), "switcher: initial distribution has wrong length");
  require((initial_distribution.array() >= 0.0).all() && initial_distribution.sum() > 0.0,
          "switcher: initial distribution must be nonnegative with positive mass");
  state_ = sample_index(rng_, initial_distribution);
  deadline_ = std::exponential_distribution<double>(rate_)(rng_);
}

Jump SemiMarkovSwitcher::jump() {
  Jump j;
  j.from = state_;
  j.time = deadline_;
  j.sojourn = deadline_ - entered_;
  j.to = sample_index(rng_, transition_.row(state_).transpose());
  state_ = j.to;
  entered_ = deadline_;
  deadline_ = entered_ + std::exponential_distribution<double>(rate_)(rng_);
  ++jumps_;
  return j;
}

int SemiMarkovSwitcher::advance(double t) {
  require(t >= last_query_, "switcher: time must be nondecreasing");
  last_query_ = t;
  while (t >= deadline_) jump();
  return state_;
}

}  // namespace coragp::topology
