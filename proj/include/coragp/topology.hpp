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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace coragp::topology {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Leader-follower digraph. Node 0 (the leader) is kept separate: followers
/// are indexed 0..n-1 here and leader_links[i] is a_i0.
/// adjacency(i, j) > 0 means follower i receives from follower j.
struct Digraph {
  std::string name;
  Matrix adjacency;     // n x n, zero diagonal
  Vector leader_links;  // n

  Digraph() = default;
  Digraph(std::string name, Matrix adjacency, Vector leader_links);

  Eigen::Index size() const { return adjacency.rows(); }
  /// 0/1 adjacency with self-loops.
  Matrix self_looped() const;
  Vector self_looped_row(Eigen::Index i) const;
};

/// L~ = D~ - A, with D~ including the leader links.
Matrix follower_laplacian(const Digraph& graph);

/// Followers that cannot be reached from the leader (empty iff the graph
/// contains a spanning tree rooted at the leader).
std::vector<Eigen::Index> unreachable_followers(const Digraph& graph);
bool has_leader_rooted_spanning_tree(const Digraph& graph);

/// Strong connectivity of the positive-entry graph of a square matrix.
bool is_irreducible(const Matrix& transition);

struct SingularRange {
  double min = 0.0;
  double max = 0.0;
};

/// Extreme singular values via the eigenvalues of M^T M.
SingularRange singular_range(const Matrix& m);

/// Fixed set of candidate graphs with cached Laplacians. Every graph must
/// contain a leader-rooted spanning tree; the constructor throws
/// ValidationError otherwise.
class TopologyEnsemble {
 public:
  explicit TopologyEnsemble(std::vector<Digraph> graphs);

  std::size_t size() const { return graphs_.size(); }
  Eigen::Index agents() const { return graphs_.front().size(); }
  const Digraph& graph(std::size_t r) const { return graphs_.at(r); }
  const Matrix& laplacian(std::size_t r) const { return laplacians_.at(r); }
  const Matrix& self_looped(std::size_t r) const { return self_looped_.at(r); }
  const SingularRange& laplacian_singular_values(std::size_t r) const { return spectra_.at(r); }

  double min_laplacian_singular_value() const;
  double max_laplacian_singular_value() const;

 private:
  std::vector<Digraph> graphs_;
  std::vector<Matrix> laplacians_;
  std::vector<Matrix> self_looped_;
  std::vector<SingularRange> spectra_;
};

struct Jump {
  int from = 0;
  int to = 0;
  double sojourn = 0.0;  // holding time spent in `from`
  double time = 0.0;     // jump instant
};

/// Semi-Markov topology index r(t) with exponential sojourn times.
///
/// The jump chain follows the row-stochastic transition matrix (zero
/// diagonal, irreducible); every holding time is Exp(rate). The initial
/// state is drawn from initial_distribution.
class SemiMarkovSwitcher {
 public:
  SemiMarkovSwitcher(Matrix transition, double rate, Vector initial_distribution, std::uint64_t seed);

  /// State active at time t (right-continuous). t must not decrease.
  int advance(double t);
  /// Forces the next jump regardless of time.
  Jump jump();

  int state() const { return state_; }
  double deadline() const { return deadline_; }
  long jumps() const { return jumps_; }
  const Matrix& transition() const { return transition_; }
  double rate() const { return rate_; }

 private:
  Matrix transition_;
  double rate_;
  std::mt19937_64 rng_;
  int state_ = 0;
  double entered_ = 0.0;
  double deadline_ = 0.0;
  double last_query_ = 0.0;
  long jumps_ = 0;
};

/// Checks shape, zero diagonal, nonnegativity and row sums (within tol).
/// Throws ValidationError naming the offending row.
void validate_transition_matrix(const Matrix& transition, double tol = 1e-12);

}  // namespace coragp::topology
