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

#include "coragp/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "coragp/error.hpp"

namespace coragp::sim {

ModeStats summarize(Predictor mode, std::span<const double> values) {
  ModeStats s;
  s.mode = mode;
  s.trials = static_cast<int>(values.size());
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const double half = 1.959963984540054 * s.stddev / std::sqrt(n);
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

MonteCarloResult monte_carlo(const Experiment& experiment, const MonteCarloOptions& options) {
  const SimConfig& config = experiment.config();
  MonteCarloResult out;
  out.modes = options.modes.empty() ? config.modes : options.modes;
  const int trials = options.trials > 0 ? options.trials : config.trials;
  require(trials >= 1, "monte carlo: at least one trial is required");
  require(!out.modes.empty(), "monte carlo: at least one mode is required");

  const std::size_t jobs = static_cast<std::size_t>(trials) * out.modes.size();
  out.trials.resize(jobs);
  std::atomic<std::size_t> next{0};
  std::mutex lock;
  std::exception_ptr failure;

  auto worker = [&] {
    RunOptions run_options;
    run_options.store_log = false;
    run_options.bound_report = false;
    for (std::size_t job = next++; job < jobs; job = next++) {
      {
        std::lock_guard<std::mutex> guard(lock);
        if (failure) return;
      }
      const int trial = static_cast<int>(job / out.modes.size());
      const Predictor mode = out.modes[job % out.modes.size()];
      try {
        TrialResult r;
        r.trial = trial;
        r.mode = mode;
        r.summary = experiment.run(mode, config.seed + static_cast<std::uint64_t>(trial), run_options).summary;
        std::lock_guard<std::mutex> guard(lock);
        out.trials[job] = r;
        if (options.on_trial) options.on_trial(r);
      } catch (...) {
        std::lock_guard<std::mutex> guard(lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  unsigned threads = options.threads > 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t m = 0; m < out.modes.size(); ++m) {
    std::vector<double> values;
    long hits = 0;
    long total = 0;
    long degenerate = 0;
    for (int k = 0; k < trials; ++k) {
      const RunSummary& s = out.at(k, m).summary;
      values.push_back(s.steady_mean_error);
      hits += s.coverage_hits;
      total += s.coverage_total;
      degenerate += s.degenerate_weights;
    }
    ModeStats stats = summarize(out.modes[m], values);
    stats.coverage = total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 1.0;
    stats.degenerate_weights = degenerate;
    out.stats.push_back(stats);
    if (options.bounds && aggregation_mode(out.modes[m])) {
      out.bounds.emplace_back(experiment.bound_summary(out.modes[m]));
    } else {
      out.bounds.emplace_back(std::nullopt);
    }
  }
  return out;
}

namespace {

std::optional<std::size_t> index_of(const MonteCarloResult& result, Predictor mode) {
  const auto it = std::find(result.modes.begin(), result.modes.end(), mode);
  if (it == result.modes.end()) return std::nullopt;
  return static_cast<std::size_t>(it - result.modes.begin());
}

}  // namespace

double ordering_fraction(const MonteCarloResult& result) {
  const auto without = index_of(result, Predictor::WithoutGP);
  const auto individual = index_of(result, Predictor::Individual);
  require(without && individual, "ordering: WithoutGP and Individual must both be present");
  std::vector<std::size_t> cooperative;
  for (Predictor p : {Predictor::CGP, Predictor::CoraTop, Predictor::CoraAvg}) {
    if (const auto k = index_of(result, p)) cooperative.push_back(*k);
  }
  const int trials = result.trial_count();
  if (trials == 0) return 0.0;
  int holds = 0;
  for (int k = 0; k < trials; ++k) {
    const double e0 = result.at(k, *without).summary.steady_mean_error;
    const double e1 = result.at(k, *individual).summary.steady_mean_error;
    bool ok = e0 > e1;
    for (std::size_t c : cooperative) ok = ok && e1 > result.at(k, c).summary.steady_mean_error;
    if (ok) ++holds;
  }
  return static_cast<double>(holds) / static_cast<double>(trials);
}

double bound_fraction(const MonteCarloResult& result, Predictor mode) {
  const auto m = index_of(result, mode);
  require(m.has_value(), "bound fraction: mode not present");
  const auto& bounds = result.bounds.at(*m);
  require(bounds.has_value(), "bound fraction: no bound report for this mode");
  const double limit = bounds->theorem.error_bound;
  const int trials = result.trial_count();
  if (trials == 0) return 0.0;
  int below = 0;
  for (int k = 0; k < trials; ++k) {
    if (result.at(k, *m).summary.steady_max_error <= limit) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(trials);
}

}  // namespace coragp::sim
