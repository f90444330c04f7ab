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
#include <functional>
#include <span>
#include <vector>

#include "coragp/experiment.hpp"

namespace coragp::sim {

struct TrialResult {
  int trial = 0;
  Predictor mode = Predictor::CoraAvg;
  RunSummary summary;
};

/// Statistics of the steady-state mean tracking error over trials.
struct ModeStats {
  Predictor mode = Predictor::CoraAvg;
  int trials = 0;
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;     // sample standard deviation
  double ci_low = 0.0;     // 95% normal-approximation interval of the mean
  double ci_high = 0.0;
  double coverage = 1.0;   // pooled over trials
  long degenerate_weights = 0;
};

/// Summary statistics of a sample; stddev and the interval collapse to the
/// mean for a single value.
ModeStats summarize(Predictor mode, std::span<const double> values);

struct MonteCarloOptions {
  int trials = 0;                // 0: config.trials
  std::vector<Predictor> modes;  // empty: config.modes
  unsigned threads = 0;          // 0: hardware concurrency
  bool bounds = true;            // compute one BoundSummary per GP mode
  std::function<void(const TrialResult&)> on_trial;  // called under a lock
};

struct MonteCarloResult {
  std::vector<Predictor> modes;
  std::vector<TrialResult> trials;            // trial-major, modes in order
  std::vector<ModeStats> stats;               // one per mode
  std::vector<std::optional<BoundSummary>> bounds;  // one per mode

  const TrialResult& at(int trial, std::size_t mode_index) const {
    return trials.at(static_cast<std::size_t>(trial) * modes.size() + mode_index);
  }
  int trial_count() const { return modes.empty() ? 0 : static_cast<int>(trials.size() / modes.size()); }
};

/// Trial k runs with seed config.seed + k; trial 0 therefore matches
/// Experiment::run(mode, config.seed). Trials run concurrently.
MonteCarloResult monte_carlo(const Experiment& experiment, const MonteCarloOptions& options = {});

/// Fraction of trials in which WithoutGP > Individual > every aggregated
/// mode present (CGP, CoraTop, CoraAvg). Requires WithoutGP and Individual.
double ordering_fraction(const MonteCarloResult& result);

/// Fraction of trials whose steady-state maximum error stays below the
/// tracking-error bound reported for the mode.
double bound_fraction(const MonteCarloResult& result, Predictor mode);

}  // namespace coragp::sim
