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
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "coragp/config.hpp"

namespace coragp::sim {

using dynamics::AgentState;
using dynamics::Vec2;

using Disturbance = std::function<Vec2(const Vec2& q, const Vec2& qdot)>;

struct Dataset {
  Eigen::MatrixXd inputs;   // M x 2
  Eigen::MatrixXd targets;  // M x 2
};

/// Noisy disturbance samples per agent. Deterministic in seed.
std::vector<Dataset> generate_training_data(const DataConfig& data, std::uint64_t seed,
                                            const Disturbance& truth = dynamics::unknown_f);

struct AgentRecord {
  Vec2 q, qdot, u, fhat, f;
  Eigen::VectorXd weights;  // h_i (empty for WithoutGP / Exact)
  double eta = std::numeric_limits<double>::quiet_NaN();  // eta~_i, NaN when not evaluated
};

struct Record {
  double t = 0.0;
  int topology = 0;  // 0-based graph index
  double error_norm = 0.0;
  std::vector<AgentRecord> agents;
};

using TrajectoryLog = std::vector<Record>;

struct RunSummary {
  Predictor mode = Predictor::CoraAvg;
  std::uint64_t seed = 0;
  long steps = 0;
  long records = 0;
  double steady_mean_error = 0.0;  // time average of ||e_bar|| over t >= settle
  double steady_max_error = 0.0;
  double final_error = 0.0;
  long coverage_hits = 0;   // (agent, dim, step) triples with |f - fhat| <= eta
  long coverage_total = 0;
  double out_of_support_fraction = 0.0;
  long degenerate_weights = 0;
  long variance_clamps = 0;
  long topology_jumps = 0;

  double coverage() const { return coverage_total > 0 ? double(coverage_hits) / double(coverage_total) : 1.0; }
};

struct BoundSummary {
  control::BoundReport theorem;
  double phi = 0.0;
  double min_variance = 0.0;  // over the bound grid and agents
  double gamma = 0.0;         // from the configured Lipschitz constants
  bool variance_condition = false;  // min variance >= gamma^2 / phi
};

struct RunOptions {
  bool store_log = true;
  bool bound_report = true;
  // Overrides the configured disturbance model (tests).
  Disturbance truth;
};

struct RunResult {
  RunSummary summary;
  TrajectoryLog log;  // empty unless store_log
  std::optional<BoundSummary> bounds;
};

/// Mutable simulation state. step() moves it forward by one dt.
struct World {
  double t = 0.0;
  long step = 0;
  std::vector<AgentState> agents;
  topology::SemiMarkovSwitcher switcher;
  int topology = 0;
};

class Experiment;

/// Closed-loop stepper for one run: per agent it shares each neighbor's
/// kernel vector between the posterior mean and the aggregation weights,
/// builds fhat_i, nu_i and u_i from the active graph and integrates the
/// manipulator dynamics over one dt.
class ClosedLoop {
 public:
  ClosedLoop(const Experiment& experiment, Predictor mode, Disturbance truth = {});

  /// Advances the world by dt. When record is non-null it receives the
  /// state, inputs and predictions at the start of the step.
  void step(World& world, Record* record = nullptr);
  /// Record at the current state without advancing time.
  Record observe(World& world);

  long degenerate_weights() const { return aggregator_.degenerate_count(); }
  long queries() const { return queries_; }
  long out_of_support() const { return out_of_support_; }
  long coverage_hits() const { return coverage_hits_; }
  long coverage_total() const { return coverage_total_; }

 private:
  void predict_all(std::span<const AgentState> states, int r, Record* record, bool with_bound);
  void accelerations(double t, std::span<const AgentState> states, int r, std::vector<Vec2>& qddot,
                     std::vector<Vec2>* inputs) const;
  Record start_record(const World& world, int r) const;

  const Experiment& experiment_;
  Predictor mode_;
  Disturbance truth_;
  aggregation::Aggregator aggregator_;
  double phi_ = 0.0;
  std::vector<Eigen::VectorXd> kvecs_;
  Eigen::MatrixXd means_;
  Eigen::VectorXd variances_;
  Eigen::MatrixXd stds_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd mean_scratch_;
  std::vector<Vec2> fhat_;
  std::vector<std::vector<Vec2>> stages_;
  std::vector<std::vector<Vec2>> velocities_;
  std::vector<AgentState> stage_state_;
  long queries_ = 0;
  long out_of_support_ = 0;
  long coverage_hits_ = 0;
  long coverage_total_ = 0;
};

/// One experiment: validated config, topology ensemble, training data and
/// fitted per-agent GPs. Immutable after construction; run() may be called
/// concurrently.
class Experiment {
 public:
  explicit Experiment(SimConfig config);

  const SimConfig& config() const { return config_; }
  const topology::TopologyEnsemble& ensemble() const { return ensemble_; }
  const std::vector<gp::Model>& models() const { return models_; }
  const std::vector<Dataset>& datasets() const { return datasets_; }

  World initial_world(std::uint64_t trial_seed) const;
  RunResult run(Predictor mode, std::uint64_t trial_seed, const RunOptions& options = {}) const;
  BoundSummary bound_summary(Predictor mode) const;

 private:
  SimConfig config_;
  topology::TopologyEnsemble ensemble_;
  std::vector<Dataset> datasets_;
  std::vector<gp::Model> models_;
};

/// Convenience: Experiment(config).run(config.mode, config.seed).
RunResult run(const SimConfig& config, const RunOptions& options = {});

/// Independent seed streams derived from one recorded seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace coragp::sim
