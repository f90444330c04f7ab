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

#include <cstdint>
#include <span>
#include <vector>

#include "coragp/config.hpp"

namespace coragp::sim {

struct BenchOptions {
  std::vector<Predictor> modes{Predictor::Individual, Predictor::CGP, Predictor::CoraTop, Predictor::CoraAvg};
  std::vector<int> sample_sizes{100, 200, 300, 400, 800};
  int repetitions = 1000;  // timed queries per (mode, M)
  int batch = 10;          // queries per clock reading
  int agents = 4;          // complete graph
  std::uint64_t seed = 1;
  gp::KernelParams kernel;
  Box box{Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Constant(2, 1.0)};
  double noise_std = 0.1;
  double sigma_g = 0.15;
  double epsilon = 1e-12;
};

/// Bench settings taken from a simulation config (kernel, data box, noise,
/// sigma_g, seed and agent count).
BenchOptions bench_options(const SimConfig& config);

struct BenchRow {
  Predictor mode = Predictor::CoraAvg;
  int samples = 0;
  bool applicable = true;  // false for modes without aggregation weights
  int repetitions = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
};

/// Per-query time of the aggregation weights of agent 1 on a complete graph
/// in which every agent holds M samples. Cora modes are timed from the
/// already computed kernel vectors; CGP time includes the posterior
/// variances. Timed on the steady (monotonic) clock in batches of
/// options.batch queries; the median is taken over batch averages.
std::vector<BenchRow> bench_weights(const BenchOptions& options);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace coragp::sim
