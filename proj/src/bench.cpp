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

#include "coragp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "coragp/error.hpp"
#include "coragp/experiment.hpp"

namespace coragp::sim {

BenchOptions bench_options(const SimConfig& config) {
  BenchOptions o;
  o.kernel = config.kernel;
  o.box = config.data.box;
  o.noise_std = config.data.noise_std;
  o.sigma_g = config.gains.sigma_g;
  o.epsilon = config.epsilon;
  o.seed = derive_seed(config.seed, 4);
  o.agents = config.agents();
  return o;
}

namespace {

using Clock = std::chrono::steady_clock;

// Keeps the optimizer from discarding the timed work.
volatile double g_sink = 0.0;

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

std::vector<BenchRow> bench_weights(const BenchOptions& options) {
  require(options.repetitions >= 1 && options.batch >= 1, "bench: repetitions and batch must be positive");
  require(options.agents >= 1, "bench: at least one agent is required");
  const auto n = static_cast<std::size_t>(options.agents);
  std::vector<BenchRow> rows;

  for (int samples : options.sample_sizes) {
    require(samples >= 1, "bench: sample sizes must be positive");
    DataConfig data;
    data.samples.assign(n, samples);
    data.box = options.box;
    data.noise_std = options.noise_std;
    const auto sets = generate_training_data(data, derive_seed(options.seed, static_cast<std::uint64_t>(samples)));
    std::vector<gp::Model> models;
    for (const Dataset& d : sets) models.push_back(gp::Model::fit(d.inputs, d.targets, options.kernel));

    // Pre-computed queries and kernel vectors, shared by every mode.
    const int batches = (options.repetitions + options.batch - 1) / options.batch;
    const int queries = batches * options.batch;
    std::mt19937_64 rng(derive_seed(options.seed, 1000 + static_cast<std::uint64_t>(samples)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<Eigen::VectorXd>> kvecs(static_cast<std::size_t>(queries));
    for (auto& per_query : kvecs) {
      Vec2 p;
      for (int d = 0; d < 2; ++d) p[d] = options.box.low[d] + (options.box.high[d] - options.box.low[d]) * unit(rng);
      for (const gp::Model& m : models) per_query.push_back(m.kernel_vector(p));
    }
    const Eigen::VectorXd row = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    Eigen::VectorXd weights(static_cast<Eigen::Index>(n));
    Eigen::VectorXd variances(static_cast<Eigen::Index>(n));

    for (Predictor mode : options.modes) {
      BenchRow r;
      r.mode = mode;
      r.samples = samples;
      const auto agg = aggregation_mode(mode);
      if (!agg || *agg == aggregation::Mode::Individual) {
        r.applicable = false;
        rows.push_back(r);
        continue;
      }
      aggregation::Aggregator aggregator(aggregation::AggregationMode{*agg, options.sigma_g, options.epsilon});
      auto one = [&](const std::vector<Eigen::VectorXd>& kv) {
        if (*agg == aggregation::Mode::CGP) {
          for (std::size_t l = 0; l < n; ++l) variances[static_cast<Eigen::Index>(l)] = models[l].variance_from_kernel(kv[l]);
          aggregator.cgp_weights(0, variances, row, weights);
        } else {
          aggregator.cora_weights(0, kv, row, weights);
        }
        g_sink = g_sink + weights[0];
      };
      // Warm-up pass over a few queries.
      for (int q = 0; q < std::min(queries, 16); ++q) one(kvecs[static_cast<std::size_t>(q)]);

      std::vector<double> per_batch;
      per_batch.reserve(static_cast<std::size_t>(batches));
      double total = 0.0;
      for (int b = 0; b < batches; ++b) {
        const auto start = Clock::now();
        for (int q = 0; q < options.batch; ++q) one(kvecs[static_cast<std::size_t>(b * options.batch + q)]);
        const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        total += ms;
        per_batch.push_back(ms / options.batch);
      }
      r.repetitions = queries;
      r.mean_ms = total / queries;
      r.median_ms = median_of(std::move(per_batch));
      rows.push_back(r);
    }
  }
  return rows;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "slope: need at least two matching points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    require(x[k] > 0.0 && y[k] > 0.0, "slope: values must be positive");
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  require(sxx > 0.0, "slope: x values must not all be equal");
  return sxy / sxx;
}

}  // namespace coragp::sim
