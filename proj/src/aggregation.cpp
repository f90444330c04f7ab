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

#include "coragp/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "coragp/error.hpp"

namespace coragp::aggregation {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Individual: return "Individual";
    case Mode::CGP: return "CGP";
    case Mode::CoraTop: return "CoraTop";
    case Mode::CoraAvg: return "CoraAvg";
  }
  return "?";
}

void AggregationMode::validate() const {
  require(gaussian_std > 0.0 && std::isfinite(gaussian_std), "aggregation: gaussian_std must be positive");
  require(epsilon > 0.0 && std::isfinite(epsilon), "aggregation: epsilon must be positive");
}

std::vector<double> correlation_top(std::span<const double> kvec, std::size_t m_min) {
  require(m_min >= 1 && m_min <= kvec.size(), "correlation_top: need 1 <= m_min <= kvec size");
  std::vector<std::size_t> order(kvec.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto larger = [&](std::size_t a, std::size_t b) {
    return kvec[a] > kvec[b] || (kvec[a] == kvec[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m_min), order.end(), larger);
  std::vector<double> out(m_min);
  for (std::size_t j = 0; j < m_min; ++j) out[j] = kvec[order[j]];
  return out;
}

double correlation_avg(std::span<const double> kvec) {
  require(!kvec.empty(), "correlation_avg: empty kernel vector");
  return Eigen::Map<const Vector>(kvec.data(), static_cast<Eigen::Index>(kvec.size())).sum() /
         static_cast<double>(kvec.size());
}

namespace {

void check_row(std::size_t i, std::size_t n, const Eigen::Ref<const Vector>& row) {
  require(i < n, "aggregation: agent index out of range");
  require(row[static_cast<Eigen::Index>(i)] > 0.0, "aggregation: adjacency row must include the self-loop");
}

}  // namespace

Aggregator::Aggregator(AggregationMode mode) : mode_(mode) { mode_.validate(); }

double Aggregator::top_norm(const Vector& kvec, std::size_t m_min) {
  const auto size = static_cast<std::size_t>(kvec.size());
  order_.resize(size);
  std::iota(order_.begin(), order_.end(), Eigen::Index{0});
  auto larger = [&](Eigen::Index a, Eigen::Index b) {
    return kvec[a] > kvec[b] || (kvec[a] == kvec[b] && a < b);
  };
  const auto mid = order_.begin() + static_cast<std::ptrdiff_t>(m_min);
  if (m_min < size) std::nth_element(order_.begin(), mid - 1, order_.end(), larger);
  double sq = 0.0;
  for (auto it = order_.begin(); it != mid; ++it) sq += kvec[*it] * kvec[*it];
  return std::sqrt(sq);
}

bool Aggregator::cora_weights(std::size_t i, std::span<const Vector> kvecs,
                              const Eigen::Ref<const Vector>& adjacency_row, Eigen::Ref<Vector> out) {
  const std::size_t n = kvecs.size();
  require(static_cast<std::size_t>(adjacency_row.size()) == n && static_cast<std::size_t>(out.size()) == n,
          "cora_weights: size mismatch between kernel vectors, adjacency row and output");
  check_row(i, n, adjacency_row);
  require(mode_.tag == Mode::CoraTop || mode_.tag == Mode::CoraAvg, "cora_weights: mode must be CoraTop or CoraAvg");

  std::size_t m_min = std::numeric_limits<std::size_t>::max();
  for (std::size_t l = 0; l < n; ++l) {
    if (adjacency_row[static_cast<Eigen::Index>(l)] > 0.0) {
      require(kvecs[l].size() > 0, "cora_weights: missing kernel vector for a neighbor");
      m_min = std::min(m_min, static_cast<std::size_t>(kvecs[l].size()));
    }
  }

  summary_.norms.setZero(static_cast<Eigen::Index>(n));
  double normalizer = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    const auto li = static_cast<Eigen::Index>(l);
    const double a = adjacency_row[li];
    if (a <= 0.0) continue;
    const Vector& k = kvecs[l];
    double s = 0.0;
    if (mode_.tag == Mode::CoraTop) {
      s = top_norm(k, m_min);
    } else {
      s = std::abs(k.sum() / static_cast<double>(k.size()));
    }
    summary_.norms[li] = s;
    normalizer += a * s;
  }
  summary_.normalizer = normalizer;

  out.setZero();
  if (!(normalizer > 0.0) || !std::isfinite(normalizer)) {
    // Query uncorrelated with every neighbor's data: uniform over neighbors.
    double count = 0.0;
    for (std::size_t l = 0; l < n; ++l) count += adjacency_row[static_cast<Eigen::Index>(l)] > 0.0 ? 1.0 : 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      const auto li = static_cast<Eigen::Index>(l);
      if (adjacency_row[li] > 0.0) out[li] = 1.0 / count;
    }
    summary_.peak = 0.0;
    ++degenerate_count_;
    return true;
  }

  double peak = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    const auto li = static_cast<Eigen::Index>(l);
    peak = std::max(peak, adjacency_row[li] * summary_.norms[li] / normalizer);
  }
  summary_.peak = peak;

  const double sg = mode_.gaussian_std;
  const double scale = 1.0 / (sg * std::sqrt(2.0 * std::numbers::pi));
  double total = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    const auto li = static_cast<Eigen::Index>(l);
    const double a = adjacency_row[li];
    if (a <= 0.0) continue;
    const double dev = summary_.norms[li] / normalizer - peak;
    out[li] = a * scale * std::exp(-dev * dev / (2.0 * sg * sg));
    total += out[li];
  }
  out /= total;
  return false;
}

void Aggregator::cgp_weights(std::size_t i, const Eigen::Ref<const Vector>& variances,
                             const Eigen::Ref<const Vector>& adjacency_row, Eigen::Ref<Vector> out) const {
  const auto n = static_cast<std::size_t>(adjacency_row.size());
  require(static_cast<std::size_t>(variances.size()) == n && static_cast<std::size_t>(out.size()) == n,
          "cgp_weights: size mismatch");
  check_row(i, n, adjacency_row);
  out.setZero();
  double total = 0.0;
  for (Eigen::Index l = 0; l < adjacency_row.size(); ++l) {
    const double a = adjacency_row[l];
    if (a <= 0.0) continue;
    out[l] = a / std::max(variances[l], mode_.epsilon);
    total += out[l];
  }
  out /= total;
}

CoraWeights cora_weights(std::size_t i, std::span<const Vector> kvecs,
                         const Eigen::Ref<const Vector>& adjacency_row, const AggregationMode& mode) {
  Aggregator aggregator(mode);
  CoraWeights result;
  result.weights.resize(static_cast<Eigen::Index>(kvecs.size()));
  result.degenerate = aggregator.cora_weights(i, kvecs, adjacency_row, result.weights);
  result.correlation = aggregator.last_correlation();
  return result;
}

Vector cgp_weights(std::size_t i, const Eigen::Ref<const Vector>& variances,
                   const Eigen::Ref<const Vector>& adjacency_row, double epsilon) {
  AggregationMode mode{Mode::CGP, 1.0, epsilon};
  Aggregator aggregator(mode);
  Vector out(adjacency_row.size());
  aggregator.cgp_weights(i, variances, adjacency_row, out);
  return out;
}

Vector aggregate_mean(const Eigen::Ref<const Vector>& weights, const Eigen::Ref<const Matrix>& neighbor_means) {
  require(weights.size() == neighbor_means.rows(), "aggregate_mean: size mismatch");
  Vector out = Vector::Zero(neighbor_means.cols());
  for (Eigen::Index l = 0; l < weights.size(); ++l) {
    if (weights[l] != 0.0) out += weights[l] * neighbor_means.row(l).transpose();
  }
  return out;
}

void BoundParams::validate() const {
  require(delta > 0.0 && delta < 1.0, "bound: delta must lie in (0, 1)");
  require(tau > 0.0, "bound: tau must be positive");
  require(domain_diameter > 0.0, "bound: domain diameter must be positive");
  require(state_dim >= 1, "bound: state dimension must be positive");
  require(agents >= 1, "bound: agent count must be positive");
}

double BoundParams::phi() const {
  validate();
  const double m = state_dim;
  const double value = 2.0 * m * std::log(domain_diameter * std::sqrt(m) / (2.0 * tau)) -
                       2.0 * std::log(delta / static_cast<double>(agents));
  require(value > 0.0, "bound: phi(tau, delta/n) is not positive; decrease tau");
  return value;
}

ErrorBound error_bound(const Eigen::Ref<const Vector>& weights, const Eigen::Ref<const Matrix>& stds, double phi) {
  require(weights.size() == stds.rows(), "error_bound: size mismatch");
  require(phi > 0.0, "error_bound: phi must be positive");
  ErrorBound out;
  out.per_dim = Vector::Zero(stds.cols());
  for (Eigen::Index l = 0; l < weights.size(); ++l) {
    if (weights[l] != 0.0) out.per_dim += weights[l] * stds.row(l).transpose();
  }
  out.per_dim *= 2.0 * std::sqrt(phi);
  out.norm = out.per_dim.norm();
  return out;
}

}  // namespace coragp::aggregation
