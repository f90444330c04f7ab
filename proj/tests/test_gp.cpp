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

#include <Eigen/LU>

#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "coragp/error.hpp"
#include "coragp/gp.hpp"
#include "support.hpp"

using coragp::gp::KernelParams;
using coragp::gp::Model;
using coragp::testing::rel_err;
using coragp::testing::uniform;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

KernelParams params(Eigen::Index dim, double signal, double inv_length, double noise) {
  KernelParams p;
  p.signal_std = signal;
  p.inv_lengthscales = VectorXd::Constant(dim, inv_length);
  p.noise_std = noise;
  return p;
}

// Straight transcription of the ARD-SE kernel, one loop per term.
double oracle_kernel(const VectorXd& a, const VectorXd& b, const KernelParams& p) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double l = p.inv_lengthscales[j];
    s += l * l * (a[j] - b[j]) * (a[j] - b[j]);
  }
  return p.signal_std * p.signal_std * std::exp(-0.5 * s);
}

struct Oracle {
  VectorXd mean;
  double variance;
};

// Posterior through an explicit dense inverse of K + noise^2 I.
Oracle dense_oracle(const MatrixXd& x, const MatrixXd& y, const KernelParams& p, const VectorXd& q) {
  const Eigen::Index m = x.rows();
  MatrixXd k(m, m);
  VectorXd ks(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) k(a, b) = oracle_kernel(x.row(a).transpose(), x.row(b).transpose(), p);
    k(a, a) += p.noise_std * p.noise_std;
    ks[a] = oracle_kernel(x.row(a).transpose(), q, p);
  }
  const MatrixXd inv = k.fullPivLu().inverse();
  return {(ks.transpose() * inv * y).transpose(), oracle_kernel(q, q, p) - ks.dot(inv * ks)};
}

}  // namespace

TEST_CASE("kernel: zero distance, symmetry and the unit-distance value") {
  std::mt19937_64 rng(11);
  const KernelParams p2 = params(3, 2.0, 0.7, 0.1);
  const VectorXd a = uniform(rng, 3, 1);
  const VectorXd b = uniform(rng, 3, 1);
  CHECK(coragp::gp::kernel_eval(a, a, p2) == doctest::Approx(4.0));
  CHECK(coragp::gp::kernel_eval(a, b, p2) == coragp::gp::kernel_eval(b, a, p2));

  const KernelParams p1 = params(1, 1.0, 1.0, 0.1);
  VectorXd zero(1), root2(1);
  zero << 0.0;
  root2 << std::sqrt(2.0);
  CHECK(coragp::gp::kernel_eval(zero, root2, p1) == doctest::Approx(0.36787944117144233).epsilon(1e-14));
}

TEST_CASE("kernel: dimension mismatch is a contract violation") {
  const KernelParams p = params(2, 1.0, 1.0, 0.1);
  VectorXd a = VectorXd::Zero(2), b = VectorXd::Zero(3);
  CHECK_THROWS_AS(coragp::gp::kernel_eval(a, b, p), coragp::ContractViolation);
}

TEST_CASE("kernel vector: entries match componentwise evaluations and lie in (0, signal^2]") {
  std::mt19937_64 rng(3);
  const KernelParams p = params(2, 1.5, 1.3, 0.1);
  const MatrixXd x = uniform(rng, 2, 2);
  const Model m = Model::fit(x, uniform(rng, 2, 1), p);
  const VectorXd q = uniform(rng, 2, 1);
  const VectorXd k = m.kernel_vector(q);
  for (int j = 0; j < 2; ++j) {
    CHECK(k[j] == doctest::Approx(coragp::gp::kernel_eval(x.row(j).transpose(), q, p)).epsilon(1e-15));
    CHECK(k[j] > 0.0);
    CHECK(k[j] <= 1.5 * 1.5);
  }
  const Model single = Model::fit(x.topRows(1), MatrixXd::Ones(1, 1), p);
  CHECK(single.kernel_vector(x.row(0).transpose())[0] == doctest::Approx(2.25));
}

TEST_CASE("fit: exact interpolation without noise and failure on duplicate inputs") {
  const KernelParams p = params(1, 1.0, 1.0, 0.0);
  MatrixXd x(1, 1), y(1, 1);
  x << 0.0;
  y << 1.0;
  const Model m = Model::fit(x, y, p);
  const auto pred = m.predict(VectorXd::Zero(1), true);
  CHECK(pred.mean[0] == doctest::Approx(1.0));
  CHECK(pred.std[0] == doctest::Approx(0.0).epsilon(1e-7));

  MatrixXd dup(2, 1), ydup(2, 1);
  dup << 0.3, 0.3;
  ydup << 1.0, 2.0;
  CHECK_THROWS_AS(Model::fit(dup, ydup, p), coragp::FactorizationError);
}

TEST_CASE("predict: matches the dense-inverse oracle on random data") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> msize(1, 10), dsize(1, 3);
    const int m = msize(rng);
    const int d = dsize(rng);
    KernelParams p = params(d, 0.5 + 1.5 * uniform(rng, 1, 1, 0, 1)(0, 0), 1.0, 0.05 + 0.3 * uniform(rng, 1, 1, 0, 1)(0, 0));
    p.inv_lengthscales = uniform(rng, d, 1, 0.3, 2.5);
    const MatrixXd x = uniform(rng, m, d);
    const MatrixXd y = uniform(rng, m, 2, -2.0, 2.0);
    const Model model = Model::fit(x, y, p);
    for (int k = 0; k < 5; ++k) {
      const VectorXd q = k < m ? VectorXd(x.row(k).transpose()) : VectorXd(uniform(rng, d, 1, -1.5, 1.5));
      const Oracle o = dense_oracle(x, y, p, q);
      const auto pred = model.predict(q, true);
      for (int j = 0; j < 2; ++j) CHECK(rel_err(pred.mean[j], o.mean[j]) <= 1e-8);
      CHECK(rel_err(pred.std[0] * pred.std[0], o.variance) <= 1e-8);
      CHECK(pred.std[0] == pred.std[1]);
    }
  }
}

TEST_CASE("predict: five-point 1-D data set against a dense solve") {
  MatrixXd x(5, 1), y(5, 1);
  x << -1.0, -0.4, 0.1, 0.5, 0.9;
  y << 0.3, -0.2, 0.8, 1.1, -0.5;
  const KernelParams p = params(1, 1.2, 1.7, 0.2);
  const Model model = Model::fit(x, y, p);
  for (double t : {-1.2, -0.4, 0.0, 0.33, 1.4}) {
    VectorXd q(1);
    q << t;
    const Oracle o = dense_oracle(x, y, p, q);
    const auto pred = model.predict(q, true);
    CHECK(rel_err(pred.mean[0], o.mean[0]) <= 1e-8);
    CHECK(rel_err(pred.std[0] * pred.std[0], o.variance) <= 1e-8);
  }
}

TEST_CASE("predict: prior recovery far from the data") {
  std::mt19937_64 rng(5);
  const KernelParams p = params(2, 1.3, 2.0, 0.1);
  const Model model = Model::fit(uniform(rng, 6, 2), uniform(rng, 6, 2), p);
  const auto pred = model.predict(VectorXd::Constant(2, 50.0), true);
  CHECK(pred.mean.norm() < 1e-12);
  CHECK(pred.std[0] == doctest::Approx(1.3));
}

TEST_CASE("predict: variance is optional and the mean path never needs it") {
  std::mt19937_64 rng(6);
  const Model model = Model::fit(uniform(rng, 8, 2), uniform(rng, 8, 2), params(2, 1.0, 1.0, 0.1));
  const auto pred = model.predict(VectorXd::Zero(2), false);
  CHECK(pred.std.size() == 0);
  CHECK(pred.mean.size() == 2);
}

TEST_CASE("property: adding a training point never increases the posterior variance") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const KernelParams p = params(2, 1.0, 1.5, 0.1);
    const MatrixXd x = uniform(rng, 7, 2);
    const MatrixXd y = uniform(rng, 7, 1);
    const Model small = Model::fit(x.topRows(6), y.topRows(6), p);
    const Model large = Model::fit(x, y, p);
    for (int k = 0; k < 10; ++k) {
      const VectorXd q = uniform(rng, 2, 1, -1.5, 1.5);
      const double before = small.predict(q, true).std[0];
      const double after = large.predict(q, true).std[0];
      CHECK(after * after <= before * before + 1e-9);
    }
  }
}

TEST_CASE("property: noise-free interpolation of distinct inputs") {
  std::mt19937_64 rng(8);
  const KernelParams p = params(2, 1.0, 2.0, 0.0);
  const MatrixXd x = uniform(rng, 12, 2);
  const MatrixXd y = uniform(rng, 12, 2);
  const Model model = Model::fit(x, y, p);
  for (int j = 0; j < 12; ++j) {
    const auto pred = model.predict(x.row(j).transpose(), false);
    CHECK((pred.mean - y.row(j).transpose()).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("property: multi-output prediction equals independent single-output fits") {
  std::mt19937_64 rng(9);
  const KernelParams p = params(2, 1.1, 1.4, 0.15);
  const MatrixXd x = uniform(rng, 9, 2);
  const MatrixXd y = uniform(rng, 9, 3);
  const Model joint = Model::fit(x, y, p);
  for (int k = 0; k < 3; ++k) {
    const Model single = Model::fit(x, y.col(k), p);
    for (int t = 0; t < 5; ++t) {
      const VectorXd q = uniform(rng, 2, 1);
      CHECK(joint.predict(q, false).mean[k] == doctest::Approx(single.predict(q, false).mean[0]).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: variance round-off is clamped at zero and counted") {
  // Noise-free, strongly correlated inputs: the exact variance at a training
  // input is 0, so round-off lands on both sides of it.
  const KernelParams p = params(1, 1.0, 0.05, 0.0);
  MatrixXd x(3, 1), y(3, 1);
  x << 0.0, 1.0, 2.0;
  y << 1.0, 2.0, 3.0;
  const Model model = Model::fit(x, y, p);
  for (int rep = 0; rep < 50; ++rep) {
    for (int k = 0; k < 3; ++k) {
      const VectorXd q = x.row(k).transpose() * (1.0 + 1e-12 * rep);
      CHECK(model.variance_from_kernel(model.kernel_vector(q)) >= 0.0);
    }
  }
  CHECK(model.numerical_warnings() > 0);
}

TEST_CASE("cost: mean is linear and variance quadratic in the data size") {
  std::mt19937_64 rng(10);
  const KernelParams p = params(2, 1.0, 3.0, 0.1);
  const std::vector<int> sizes{100, 200, 400, 800};
  std::vector<double> mean_t, var_t;
  for (int m : sizes) {
    const Model model = Model::fit(uniform(rng, m, 2), uniform(rng, m, 2), p);
    const MatrixXd queries = uniform(rng, 2, 64);
    VectorXd k(m), out(2);
    double sink = 0.0;
    auto time = [&](auto&& body, int reps) {
      const auto start = std::chrono::steady_clock::now();
      for (int r = 0; r < reps; ++r) body(r % 64);
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
    };
    std::vector<VectorXd> kvecs;
    for (int q = 0; q < 64; ++q) kvecs.push_back(model.kernel_vector(queries.col(q)));
    double best_mean = 1e9, best_var = 1e9;
    for (int round = 0; round < 3; ++round) {
      best_mean = std::min(best_mean, time([&](int q) {
                             model.mean_from_kernel(kvecs[q], out);
                             sink += out[0];
                           }, 20000));
      best_var = std::min(best_var, time([&](int q) { sink += model.variance_from_kernel(kvecs[q]); }, 200));
    }
    CHECK(std::isfinite(sink));
    mean_t.push_back(best_mean);
    var_t.push_back(best_var);
  }
  auto slope = [&](const std::vector<double>& t) {
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      mx += std::log(sizes[k]);
      my += std::log(t[k]);
    }
    mx /= 4;
    my /= 4;
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      sxy += (std::log(sizes[k]) - mx) * (std::log(t[k]) - my);
      sxx += (std::log(sizes[k]) - mx) * (std::log(sizes[k]) - mx);
    }
    return sxy / sxx;
  };
  // The mean is cheap enough that per-call overhead distorts its slope, so
  // compare marginal costs instead: linear cost doubles per doubling of M.
  const double r_mean = (mean_t[3] - mean_t[2]) / (mean_t[2] - mean_t[1]);
  const double s_var = slope(var_t);
  INFO("mean marginal ratio " << r_mean << ", variance slope " << s_var);
  CHECK(r_mean >= 1.2);
  CHECK(r_mean <= 3.0);
  CHECK(s_var >= 1.6);
  CHECK(s_var <= 2.4);
}
