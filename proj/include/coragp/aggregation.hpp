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
#include <string_view>
#include <vector>

namespace coragp::aggregation {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Mode { Individual, CGP, CoraTop, CoraAvg };

std::string_view to_string(Mode mode);

struct AggregationMode {
  Mode tag = Mode::CoraAvg;
  double gaussian_std = 0.15;  // spread of the Gaussian weight kernel (Cora modes)
  double epsilon = 1e-12;      // variance floor (CGP)

  void validate() const;
};

/// The m_min largest entries of kvec. Ties resolve to the lower original
/// index; result is ordered by decreasing value.
std::vector<double> correlation_top(std::span<const double> kvec, std::size_t m_min);

/// Mean of the kernel vector entries.
double correlation_avg(std::span<const double> kvec);

struct CorrelationSummary {
  Vector norms;             // ||s_il|| per agent, 0 off-neighborhood
  double normalizer = 0.0;  // sum of the neighborhood norms
  double peak = 0.0;        // largest normalized correlation
};

struct CoraWeights {
  Vector weights;  // h_i, length n
  CorrelationSummary correlation;
  bool degenerate = false;  // true when every neighbor correlation vanished
};

/// Correlation-aware weights for agent i.
///
/// kvecs holds one kernel vector k(P_l, p) per agent (entries for agents
/// outside the inclusive neighborhood are never read and may be empty);
/// adjacency_row is the 0/1 self-looped row of agent i.
CoraWeights cora_weights(std::size_t i, std::span<const Vector> kvecs,
                         const Eigen::Ref<const Vector>& adjacency_row, const AggregationMode& mode);

/// Inverse-variance weights (cooperative-GP baseline).
Vector cgp_weights(std::size_t i, const Eigen::Ref<const Vector>& variances,
                   const Eigen::Ref<const Vector>& adjacency_row, double epsilon);

/// Convex combination of neighbor means (rows of neighbor_means, n x m).
/// Rows with zero weight are never read.
Vector aggregate_mean(const Eigen::Ref<const Vector>& weights, const Eigen::Ref<const Matrix>& neighbor_means);

struct BoundParams {
  double delta = 0.05;
  double tau = 1e-3;
  double domain_diameter = 2.0 * 1.4142135623730951;
  int state_dim = 2;
  int agents = 4;

  /// 2 m log(r sqrt(m) / (2 tau)) - 2 log(delta / n). Throws if not positive.
  double phi() const;
  void validate() const;
};

struct ErrorBound {
  Vector per_dim;      // eta_ij
  double norm = 0.0;   // eta~_i
};

/// stds: n x m matrix of per-agent posterior standard deviations. Rows with
/// zero weight are never read. phi is BoundParams::phi().
ErrorBound error_bound(const Eigen::Ref<const Vector>& weights, const Eigen::Ref<const Matrix>& stds, double phi);

/// Reusable evaluator for the hot path: keeps scratch buffers so repeated
/// weight computations do not allocate. Not thread-safe; use one per thread.
class Aggregator {
 public:
  explicit Aggregator(AggregationMode mode);

  const AggregationMode& mode() const { return mode_; }

  /// Writes h_i into out (length n). Returns true on the degenerate
  /// (uniform) fallback.
  bool cora_weights(std::size_t i, std::span<const Vector> kvecs,
                    const Eigen::Ref<const Vector>& adjacency_row, Eigen::Ref<Vector> out);

  void cgp_weights(std::size_t i, const Eigen::Ref<const Vector>& variances,
                   const Eigen::Ref<const Vector>& adjacency_row, Eigen::Ref<Vector> out) const;

  const CorrelationSummary& last_correlation() const { return summary_; }
  long degenerate_count() const { return degenerate_count_; }

 private:
  double top_norm(const Vector& kvec, std::size_t m_min);

  AggregationMode mode_;
  CorrelationSummary summary_;
  std::vector<Eigen::Index> order_;
  long degenerate_count_ = 0;
};

}  // namespace coragp::aggregation
