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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "coragp/aggregation.hpp"
#include "coragp/error.hpp"
#include "support.hpp"

using namespace coragp::aggregation;
using coragp::testing::uniform;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::vector<VectorXd> random_kvecs(std::mt19937_64& rng, std::size_t n, int lo = 3, int hi = 12) {
  std::uniform_int_distribution<int> size(lo, hi);
  std::vector<VectorXd> out;
  for (std::size_t l = 0; l < n; ++l) out.push_back(uniform(rng, size(rng), 1, 0.0, 1.0));
  return out;
}

VectorXd random_row(std::mt19937_64& rng, std::size_t n, std::size_t i) {
  std::bernoulli_distribution edge(0.5);
  VectorXd row(static_cast<Eigen::Index>(n));
  for (std::size_t l = 0; l < n; ++l) row[static_cast<Eigen::Index>(l)] = (l == i || edge(rng)) ? 1.0 : 0.0;
  return row;
}

// Independent transcription of the correlation-aware weights: build the
// per-neighbor correlation norm, normalize, center a Gaussian on the peak.
VectorXd oracle_weights(const std::vector<VectorXd>& kvecs, const VectorXd& row, Mode mode, double sg) {
  const auto n = row.size();
  std::size_t m_min = SIZE_MAX;
  for (Eigen::Index l = 0; l < n; ++l) {
    if (row[l] > 0) m_min = std::min<std::size_t>(m_min, kvecs[static_cast<std::size_t>(l)].size());
  }
  VectorXd s = VectorXd::Zero(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    if (row[l] <= 0) continue;
    std::vector<double> v(kvecs[static_cast<std::size_t>(l)].data(),
                          kvecs[static_cast<std::size_t>(l)].data() + kvecs[static_cast<std::size_t>(l)].size());
    if (mode == Mode::CoraTop) {
      std::sort(v.begin(), v.end(), std::greater<>());
      double sq = 0;
      for (std::size_t k = 0; k < m_min; ++k) sq += v[k] * v[k];
      s[l] = std::sqrt(sq);
    } else {
      double sum = 0;
      for (double x : v) sum += x;
      s[l] = std::abs(sum / static_cast<double>(v.size()));
    }
  }
  const double total = row.dot(s);
  double peak = 0;
  for (Eigen::Index l = 0; l < n; ++l) peak = std::max(peak, row[l] * s[l] / total);
  VectorXd w = VectorXd::Zero(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    if (row[l] <= 0) continue;
    const double x = s[l] / total - peak;
    w[l] = row[l] / (sg * std::sqrt(2 * std::numbers::pi)) * std::exp(-x * x / (2 * sg * sg));
  }
  return w / w.sum();
}

}  // namespace

TEST_CASE("correlation_top: direct selection, identity and ties") {
  const std::vector<double> k{0.1, 0.9, 0.5};
  const auto top2 = correlation_top(k, 2);
  CHECK(top2 == std::vector<double>{0.9, 0.5});
  const auto all = correlation_top(k, 3);
  CHECK(all == std::vector<double>{0.9, 0.5, 0.1});
  CHECK_THROWS_AS(correlation_top(k, 4), coragp::ContractViolation);
  CHECK_THROWS_AS(correlation_top(k, 0), coragp::ContractViolation);
}

TEST_CASE("correlation_top: matches a full-sort oracle") {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 100; ++trial) {
    const VectorXd v = uniform(rng, 50, 1, 0.0, 1.0);
    std::vector<double> data(v.data(), v.data() + 50);
    std::vector<double> sorted = data;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    auto got = correlation_top(data, 7);
    std::sort(got.begin(), got.end(), std::greater<>());
    CHECK(got == std::vector<double>(sorted.begin(), sorted.begin() + 7));
  }
}

TEST_CASE("correlation_avg: hand sums and bounds") {
  CHECK(correlation_avg(std::vector<double>{0.2, 0.6, 0.4, 0.8}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(correlation_avg(std::vector<double>{0.3, 0.3, 0.3}) == doctest::Approx(0.3));
  std::mt19937_64 rng(51);
  const VectorXd v = uniform(rng, 20, 1, 1e-3, 2.0);
  const double a = correlation_avg(std::span<const double>(v.data(), 20));
  CHECK(a > 0.0);
  CHECK(a <= 2.0);
}

TEST_CASE("cora_weights: single neighbor and symmetric neighbors") {
  const AggregationMode avg{Mode::CoraAvg, 0.15, 1e-12};
  std::vector<VectorXd> k{VectorXd::Constant(3, 0.4), VectorXd::Constant(3, 0.4), VectorXd::Constant(2, 0.9)};
  VectorXd self(3);
  self << 0, 1, 0;
  CHECK(cora_weights(1, k, self, avg).weights.isApprox(VectorXd::Unit(3, 1)));
  VectorXd pair(3);
  pair << 1, 1, 0;
  const CoraWeights w = cora_weights(0, k, pair, avg);
  CHECK(w.weights[0] == doctest::Approx(0.5));
  CHECK(w.weights[1] == doctest::Approx(0.5));
  CHECK(w.weights[2] == 0.0);
}

TEST_CASE("cora_weights: frozen transcription for correlation ratios (0.5, 0.3, 0.2)") {
  // Values from an independent script evaluating the weight formula.
  const double expected[3] = {0.646643324337919, 0.265843018209744, 0.08751365745233708};
  std::vector<VectorXd> k{VectorXd::Constant(1, 0.5), VectorXd::Constant(1, 0.3), VectorXd::Constant(1, 0.2)};
  const VectorXd row = VectorXd::Ones(3);
  for (Mode mode : {Mode::CoraAvg, Mode::CoraTop}) {
    const CoraWeights w = cora_weights(0, k, row, AggregationMode{mode, 0.15, 1e-12});
    for (int l = 0; l < 3; ++l) CHECK(std::abs(w.weights[l] - expected[l]) <= 1e-12);
    CHECK(w.correlation.normalizer == doctest::Approx(1.0));
    CHECK(w.correlation.peak == doctest::Approx(0.5));
  }
}

TEST_CASE("cora_weights: matches the transcription oracle on random instances") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const std::size_t i = trial % n;
    const auto k = random_kvecs(rng, n);
    const VectorXd row = random_row(rng, n, i);
    const Mode mode = trial % 2 ? Mode::CoraTop : Mode::CoraAvg;
    const CoraWeights w = cora_weights(i, k, row, AggregationMode{mode, 0.15, 1e-12});
    CHECK((w.weights - oracle_weights(k, row, mode, 0.15)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("cora_weights: peak neighbor gets the largest weight") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5;
    const auto k = random_kvecs(rng, n);
    const VectorXd row = random_row(rng, n, 0);
    const CoraWeights w = cora_weights(0, k, row, AggregationMode{Mode::CoraAvg, 0.15, 1e-12});
    Eigen::Index best = 0;
    (row.cwiseProduct(w.correlation.norms)).maxCoeff(&best);
    CHECK(w.weights[best] == doctest::Approx(w.weights.maxCoeff()));
  }
}

TEST_CASE("cora_weights: all-zero correlation falls back to uniform and is flagged") {
  std::vector<VectorXd> k{VectorXd::Zero(4), VectorXd::Zero(3), VectorXd::Zero(5)};
  VectorXd row(3);
  row << 1, 0, 1;
  Aggregator agg(AggregationMode{Mode::CoraTop, 0.15, 1e-12});
  VectorXd out(3);
  CHECK(agg.cora_weights(0, k, row, out));
  CHECK(out[0] == doctest::Approx(0.5));
  CHECK(out[1] == 0.0);
  CHECK(out[2] == doctest::Approx(0.5));
  CHECK(agg.degenerate_count() == 1);
}

TEST_CASE("cora_weights: missing self-loop is a contract violation") {
  std::vector<VectorXd> k{VectorXd::Ones(2), VectorXd::Ones(2)};
  VectorXd row(2);
  row << 0, 1;
  CHECK_THROWS_AS(cora_weights(0, k, row, AggregationMode{}), coragp::ContractViolation);
}

TEST_CASE("cgp_weights: inverse-variance arithmetic") {
  VectorXd var(2), row = VectorXd::Ones(2);
  var << 1.0, 4.0;
  const VectorXd w = cgp_weights(0, var, row, 1e-12);
  CHECK(w[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(0.2).epsilon(1e-15));
  var << 0.3, 0.3;
  CHECK(cgp_weights(1, var, row, 1e-12).isApprox(VectorXd::Constant(2, 0.5)));
  var << 0.0, 1.0;
  CHECK(cgp_weights(1, var, row, 1e-12)[0] > 1.0 - 1e-11);
}

TEST_CASE("aggregate_mean: dot product, fixed point and selection") {
  VectorXd h(3);
  h << 0.2, 0.3, 0.5;
  MatrixXd means(3, 2);
  means << 1, 1, 2, 2, 3, 3;
  const VectorXd mu = aggregate_mean(h, means);
  CHECK(mu[0] == doctest::Approx(2.3).epsilon(1e-15));
  CHECK(mu[1] == doctest::Approx(2.3).epsilon(1e-15));
  MatrixXd same = MatrixXd::Constant(3, 2, 0.7);
  CHECK(aggregate_mean(h, same).isApprox(VectorXd::Constant(2, 0.7)));
  // Rows with zero weight are never read, even if not finite.
  means(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK(aggregate_mean(VectorXd::Unit(3, 2), means).isApprox(VectorXd::Constant(2, 3.0)));
}

TEST_CASE("error bound: phi, zero variance, unit weight and random transcription") {
  BoundParams p;  // delta .05, tau 1e-3, diameter 2 sqrt 2, m 2, n 4
  CHECK(p.phi() == doctest::Approx(39.16766310751609).epsilon(1e-13));

  const VectorXd unit = VectorXd::Unit(3, 1);
  CHECK(error_bound(unit, MatrixXd::Zero(3, 2), 4.0).norm == 0.0);
  const ErrorBound e = error_bound(unit, MatrixXd::Constant(3, 2, 0.25), 4.0);
  CHECK(e.per_dim[0] == doctest::Approx(1.0));
  CHECK(e.per_dim[1] == doctest::Approx(1.0));

  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd h = uniform(rng, 4, 1, 0.0, 1.0);
    h /= h.sum();
    const MatrixXd stds = uniform(rng, 4, 3, 0.0, 1.0);
    const double phi = 1.0 + 50.0 * uniform(rng, 1, 1, 0.0, 1.0)(0, 0);
    const ErrorBound b = error_bound(h, stds, phi);
    double sq = 0;
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int l = 0; l < 4; ++l) s += h[l] * stds(l, j);
      const double eta = 2.0 * std::sqrt(phi) * s;
      CHECK(std::abs(b.per_dim[j] - eta) <= 1e-12 * std::max(1.0, eta));
      sq += eta * eta;
    }
    CHECK(std::abs(b.norm - std::sqrt(sq)) <= 1e-12 * std::max(1.0, b.norm));
  }
}

TEST_CASE("error bound: non-positive phi is rejected") {
  BoundParams p;
  p.tau = 10.0;
  p.delta = 0.99;
  p.agents = 1;
  CHECK_THROWS_AS(p.phi(), coragp::ContractViolation);
}

TEST_CASE("fuzz: simplex and locality for every mode") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + trial % 7;
    const std::size_t i = static_cast<std::size_t>(unit(rng) * n) % n;
    auto k = random_kvecs(rng, n, 1, 8);
    const VectorXd row = random_row(rng, n, i);
    VectorXd var = uniform(rng, n, 1, 0.01, 2.0);
    for (Mode mode : {Mode::CGP, Mode::CoraTop, Mode::CoraAvg}) {
      Aggregator agg(AggregationMode{mode, 0.05 + unit(rng), 1e-12});
      VectorXd w(static_cast<Eigen::Index>(n));
      auto compute = [&](const std::vector<VectorXd>& kk, const VectorXd& vv) {
        if (mode == Mode::CGP) {
          agg.cgp_weights(i, vv, row, w);
        } else {
          agg.cora_weights(i, kk, row, w);
        }
        return VectorXd(w);
      };
      const VectorXd base = compute(k, var);
      CHECK(base.minCoeff() >= 0.0);
      CHECK(std::abs(base.sum() - 1.0) <= 1e-12);
      for (Eigen::Index l = 0; l < row.size(); ++l) {
        if (row[l] == 0.0) CHECK(base[l] == 0.0);
      }
      // Perturb every non-neighbor.
      auto k2 = k;
      VectorXd var2 = var;
      for (Eigen::Index l = 0; l < row.size(); ++l) {
        if (row[l] != 0.0) continue;
        k2[static_cast<std::size_t>(l)] = uniform(rng, 1 + trial % 5, 1, 0.0, 3.0);
        var2[l] = 1e-6 + unit(rng);
      }
      CHECK(compute(k2, var2) == base);
    }
  }
}

TEST_CASE("reduction: with only the self-loop every mode selects the own mean") {
  std::mt19937_64 rng(56);
  const std::size_t n = 4;
  const auto k = random_kvecs(rng, n);
  const VectorXd var = uniform(rng, n, 1, 0.1, 1.0);
  const MatrixXd means = uniform(rng, n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const VectorXd row = VectorXd::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i));
    const VectorXd own = means.row(static_cast<Eigen::Index>(i)).transpose();
    CHECK(aggregate_mean(cgp_weights(i, var, row, 1e-12), means) == own);
    CHECK(aggregate_mean(cora_weights(i, k, row, AggregationMode{Mode::CoraTop}).weights, means) == own);
    CHECK(aggregate_mean(cora_weights(i, k, row, AggregationMode{Mode::CoraAvg}).weights, means) == own);
  }
}
