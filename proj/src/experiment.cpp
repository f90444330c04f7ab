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

#include "coragp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "coragp/error.hpp"

namespace coragp::sim {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream).
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<Dataset> generate_training_data(const DataConfig& data, std::uint64_t seed, const Disturbance& truth) {
  require(data.box.dim() == 2, "training data: the sampling box must be two-dimensional");
  require(data.regions.empty() || data.regions.size() == data.samples.size(),
          "training data: need one region per agent or none");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  auto sample_in = [&](const Box& box) {
    Vec2 q;
    for (int d = 0; d < 2; ++d) q[d] = box.low[d] + (box.high[d] - box.low[d]) * unit(rng);
    return q;
  };

  std::vector<Dataset> out;
  out.reserve(data.samples.size());
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const int count = data.samples[i];
    require(count >= 1, "training data: every agent needs at least one sample");
    Dataset set{Eigen::MatrixXd(count, 2), Eigen::MatrixXd(count, 2)};
    for (int s = 0; s < count; ++s) {
      const bool regional = !data.regions.empty() && unit(rng) < data.region_fraction;
      const Vec2 q = sample_in(regional ? data.regions[i] : data.box);
      const Vec2 f = truth(q, Vec2::Zero());
      set.inputs.row(s) = q.transpose();
      for (int d = 0; d < 2; ++d) set.targets(s, d) = f[d] + data.noise_std * noise(rng);
    }
    out.push_back(std::move(set));
  }
  return out;
}

namespace {

double tracking_error_norm(std::span<const AgentState> agents, const dynamics::LeaderState& leader) {
  double sq = 0.0;
  for (const AgentState& a : agents) {
    sq += (a.q - leader.q).squaredNorm() + (a.qdot - leader.qdot).squaredNorm();
  }
  return std::sqrt(sq);
}

topology::SemiMarkovSwitcher make_switcher(const SimConfig& config, std::uint64_t seed) {
  return topology::SemiMarkovSwitcher(config.topology.transition, config.topology.rate,
                                      config.topology.initial_distribution, seed);
}

}  // namespace

// ---------------------------------------------------------------------------
// ClosedLoop

ClosedLoop::ClosedLoop(const Experiment& experiment, Predictor mode, Disturbance truth)
    : experiment_(experiment),
      mode_(mode),
      truth_(truth ? std::move(truth) : Disturbance(dynamics::unknown_f)),
      aggregator_(aggregation::AggregationMode{aggregation_mode(mode).value_or(aggregation::Mode::CoraAvg),
                                               experiment.config().gains.sigma_g, experiment.config().epsilon}) {
  const SimConfig& config = experiment.config();
  const auto n = static_cast<std::size_t>(config.agents());
  kvecs_.resize(n);
  for (std::size_t l = 0; l < n; ++l) kvecs_[l].resize(experiment.models()[l].size());
  means_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 2);
  stds_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 2);
  variances_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  weights_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  mean_scratch_ = Eigen::VectorXd::Zero(2);
  fhat_.assign(n, Vec2::Zero());
  stages_.assign(4, std::vector<Vec2>(n, Vec2::Zero()));
  velocities_.assign(4, std::vector<Vec2>(n, Vec2::Zero()));
  stage_state_.resize(n);
  if (aggregation_mode(mode) && config.bound.stride > 0) phi_ = config.bound_params().phi();
}

void ClosedLoop::predict_all(std::span<const AgentState> states, int r, Record* record, bool with_bound) {
  const auto& models = experiment_.models();
  const Box& box = experiment_.config().data.box;
  const auto n = states.size();
  const auto agg = aggregation_mode(mode_);
  with_bound = with_bound && agg.has_value() && phi_ > 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const Vec2& q = states[i].q;
    if (record) {
      ++queries_;
      if (!box.contains(q)) ++out_of_support_;
    }
    if (mode_ == Predictor::WithoutGP) {
      fhat_[i].setZero();
      continue;
    }
    if (mode_ == Predictor::Exact) {
      fhat_[i] = truth_(q, states[i].qdot);
      continue;
    }

    const Eigen::MatrixXd& adjacency = experiment_.ensemble().self_looped(static_cast<std::size_t>(r));
    if (mode_ == Predictor::Individual) {
      models[i].kernel_vector(q, kvecs_[i]);
      models[i].mean_from_kernel(kvecs_[i], mean_scratch_);
      means_.row(ii) = mean_scratch_.transpose();
      weights_.setZero();
      weights_[ii] = 1.0;
    } else {
      const Eigen::VectorXd row = adjacency.row(ii).transpose();
      for (std::size_t l = 0; l < n; ++l) {
        const auto li = static_cast<Eigen::Index>(l);
        if (row[li] <= 0.0) continue;
        models[l].kernel_vector(q, kvecs_[l]);
        models[l].mean_from_kernel(kvecs_[l], mean_scratch_);
        means_.row(li) = mean_scratch_.transpose();
        if (mode_ == Predictor::CGP || with_bound) variances_[li] = models[l].variance_from_kernel(kvecs_[l]);
      }
      if (mode_ == Predictor::CGP) {
        aggregator_.cgp_weights(i, variances_, row, weights_);
      } else {
        aggregator_.cora_weights(i, kvecs_, row, weights_);
      }
    }
    fhat_[i] = aggregation::aggregate_mean(weights_, means_);

    if (record) {
      AgentRecord& rec = record->agents[i];
      rec.weights = weights_;
      if (with_bound) {
        if (mode_ == Predictor::Individual) variances_[ii] = models[i].variance_from_kernel(kvecs_[i]);
        for (std::size_t l = 0; l < n; ++l) {
          const auto li = static_cast<Eigen::Index>(l);
          if (weights_[li] != 0.0) stds_.row(li).setConstant(std::sqrt(variances_[li]));
        }
        const aggregation::ErrorBound bound = aggregation::error_bound(weights_, stds_, phi_);
        rec.eta = bound.norm;
        const Vec2 f = truth_(q, states[i].qdot);
        for (int d = 0; d < 2; ++d) {
          ++coverage_total_;
          if (std::abs(f[d] - fhat_[i][d]) <= bound.per_dim[d]) ++coverage_hits_;
        }
      }
    }
  }
}

void ClosedLoop::accelerations(double t, std::span<const AgentState> states, int r, std::vector<Vec2>& qddot,
                               std::vector<Vec2>* inputs) const {
  const SimConfig& config = experiment_.config();
  const topology::Digraph& graph = experiment_.ensemble().graph(static_cast<std::size_t>(r));
  const dynamics::LeaderState leader = config.leader.at(t);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const control::SyncError sync = control::sync_error(i, states, leader, graph, config.gains.alpha);
    const Vec2 u = control::control_input(states[i], sync.nu, fhat_[i], config.manipulator,
                                          config.gains.c[static_cast<Eigen::Index>(i)]);
    qddot[i] = dynamics::forward_dynamics(states[i], u, config.manipulator, truth_(states[i].q, states[i].qdot));
    if (inputs) (*inputs)[i] = u;
  }
}

Record ClosedLoop::start_record(const World& world, int r) const {
  Record rec;
  rec.t = world.t;
  rec.topology = r;
  rec.error_norm = tracking_error_norm(world.agents, experiment_.config().leader.at(world.t));
  rec.agents.resize(world.agents.size());
  for (std::size_t i = 0; i < world.agents.size(); ++i) {
    rec.agents[i].q = world.agents[i].q;
    rec.agents[i].qdot = world.agents[i].qdot;
  }
  return rec;
}

Record ClosedLoop::observe(World& world) {
  const int r = world.switcher.advance(world.t);
  world.topology = r;
  Record rec = start_record(world, r);
  const SimConfig& config = experiment_.config();
  const bool with_bound = config.bound.stride > 0 && world.step % config.bound.stride == 0;
  predict_all(world.agents, r, &rec, with_bound);
  std::vector<Vec2> inputs(world.agents.size());
  accelerations(world.t, world.agents, r, stages_[0], &inputs);
  for (std::size_t i = 0; i < world.agents.size(); ++i) {
    rec.agents[i].u = inputs[i];
    rec.agents[i].fhat = fhat_[i];
    rec.agents[i].f = truth_(world.agents[i].q, world.agents[i].qdot);
  }
  return rec;
}

void ClosedLoop::step(World& world, Record* record) {
  const SimConfig& config = experiment_.config();
  const double dt = config.dt;
  const std::size_t n = world.agents.size();

  if (record) {
    *record = observe(world);
  } else {
    const int r = world.switcher.advance(world.t);
    world.topology = r;
    predict_all(world.agents, r, nullptr, false);
    accelerations(world.t, world.agents, r, stages_[0], nullptr);
  }
  const int r = world.topology;

  if (config.integrator == Integrator::Euler) {
    for (std::size_t i = 0; i < n; ++i) {
      world.agents[i].q += dt * world.agents[i].qdot;
      world.agents[i].qdot += dt * stages_[0][i];
    }
  } else {
    // Classical RK4 on the stacked (q, qdot) state: velocities_[k] and
    // stages_[k] are the derivative of q and qdot at stage k.
    for (std::size_t i = 0; i < n; ++i) velocities_[0][i] = world.agents[i].qdot;
    const double offsets[3] = {0.5 * dt, 0.5 * dt, dt};
    for (int k = 1; k < 4; ++k) {
      const double h = offsets[k - 1];
      for (std::size_t i = 0; i < n; ++i) {
        stage_state_[i].q = world.agents[i].q + h * velocities_[k - 1][i];
        stage_state_[i].qdot = world.agents[i].qdot + h * stages_[k - 1][i];
        velocities_[k][i] = stage_state_[i].qdot;
      }
      if (!config.prediction_hold) predict_all(stage_state_, r, nullptr, false);
      accelerations(world.t + h, stage_state_, r, stages_[k], nullptr);
    }
    for (std::size_t i = 0; i < n; ++i) {
      world.agents[i].q += dt / 6.0 *
                           (velocities_[0][i] + 2.0 * velocities_[1][i] + 2.0 * velocities_[2][i] + velocities_[3][i]);
      world.agents[i].qdot += dt / 6.0 * (stages_[0][i] + 2.0 * stages_[1][i] + 2.0 * stages_[2][i] + stages_[3][i]);
    }
  }

  ++world.step;
  world.t = static_cast<double>(world.step) * dt;
  for (std::size_t i = 0; i < n; ++i) {
    if (!world.agents[i].finite()) {
      std::ostringstream msg;
      msg << "non-finite state of agent " << (i + 1) << " at t=" << world.t;
      throw NumericalError(msg.str());
    }
  }
}

// ---------------------------------------------------------------------------
// Experiment

Experiment::Experiment(SimConfig config)
    : config_((config.validate(), std::move(config))), ensemble_(config_.topology.graphs) {
  datasets_ = generate_training_data(config_.data, derive_seed(config_.seed, 1));
  models_.reserve(datasets_.size());
  for (const Dataset& d : datasets_) models_.push_back(gp::Model::fit(d.inputs, d.targets, config_.kernel));
}

World Experiment::initial_world(std::uint64_t trial_seed) const {
  std::mt19937_64 rng(derive_seed(trial_seed, 2));
  const InitialConfig& init = config_.initial;
  std::uniform_real_distribution<double> pos(init.q_low, init.q_high);
  std::uniform_real_distribution<double> vel(init.qdot_low, init.qdot_high);
  std::vector<AgentState> agents(static_cast<std::size_t>(config_.agents()));
  for (AgentState& a : agents) {
    for (int d = 0; d < 2; ++d) a.q[d] = pos(rng);
    for (int d = 0; d < 2; ++d) a.qdot[d] = vel(rng);
  }
  World world{0.0, 0, std::move(agents), make_switcher(config_, derive_seed(trial_seed, 3)), 0};
  world.topology = world.switcher.state();
  return world;
}

RunResult Experiment::run(Predictor mode, std::uint64_t trial_seed, const RunOptions& options) const {
  RunResult result;
  RunSummary& s = result.summary;
  s.mode = mode;
  s.seed = trial_seed;
  s.steps = config_.steps();

  World world = initial_world(trial_seed);
  ClosedLoop loop(*this, mode, options.truth);
  const double settle = config_.settle();
  double steady_sum = 0.0;
  long steady_count = 0;
  std::deque<Record> recent;

  auto account = [&](Record&& rec) {
    if (rec.t >= settle - 1e-9) {
      steady_sum += rec.error_norm;
      ++steady_count;
      s.steady_max_error = std::max(s.steady_max_error, rec.error_norm);
    }
    s.final_error = rec.error_norm;
    ++s.records;
    if (recent.size() == 10) recent.pop_front();
    if (options.store_log) {
      result.log.push_back(rec);
      recent.push_back(std::move(rec));
    } else {
      recent.push_back(std::move(rec));
    }
  };

  try {
    for (long k = 0; k < s.steps; ++k) {
      Record rec;
      loop.step(world, &rec);
      account(std::move(rec));
    }
    account(loop.observe(world));
  } catch (const NumericalError& e) {
    std::ostringstream msg;
    msg << e.what() << " (mode " << to_string(mode) << ", seed " << trial_seed << "); last records:";
    for (const Record& r : recent) {
      msg << "\n  t=" << r.t << " graph=" << (r.topology + 1) << " |e|=" << r.error_norm;
      for (std::size_t i = 0; i < r.agents.size(); ++i) {
        msg << " q" << (i + 1) << "=(" << r.agents[i].q.transpose() << ")";
      }
    }
    throw NumericalError(msg.str());
  }

  s.steady_mean_error = steady_count > 0 ? steady_sum / static_cast<double>(steady_count) : 0.0;
  s.coverage_hits = loop.coverage_hits();
  s.coverage_total = loop.coverage_total();
  s.out_of_support_fraction =
      loop.queries() > 0 ? static_cast<double>(loop.out_of_support()) / static_cast<double>(loop.queries()) : 0.0;
  s.degenerate_weights = loop.degenerate_weights();
  for (const gp::Model& m : models_) s.variance_clamps += m.numerical_warnings();
  s.topology_jumps = world.switcher.jumps();
  if (options.bound_report) result.bounds = bound_summary(mode);
  return result;
}

BoundSummary Experiment::bound_summary(Predictor mode) const {
  const auto n = static_cast<std::size_t>(config_.agents());
  const aggregation::BoundParams params = config_.bound_params();
  BoundSummary out;
  out.phi = params.phi();

  // Learners without weights of their own are bounded as individual GPs.
  const auto agg = aggregation_mode(mode).value_or(aggregation::Mode::Individual);
  aggregation::Aggregator aggregator(aggregation::AggregationMode{
      agg == aggregation::Mode::Individual ? aggregation::Mode::CoraAvg : agg, config_.gains.sigma_g,
      config_.epsilon});

  const int points = std::max(1, config_.bound.grid_points);
  const Box& box = config_.data.box;
  std::vector<Eigen::VectorXd> kvecs(n);
  Eigen::VectorXd variances(static_cast<Eigen::Index>(n));
  Eigen::MatrixXd stds(static_cast<Eigen::Index>(n), 2);
  Eigen::VectorXd weights(static_cast<Eigen::Index>(n));
  std::vector<double> worst(n, 0.0);
  out.min_variance = std::numeric_limits<double>::infinity();

  for (int a = 0; a < points; ++a) {
    for (int b = 0; b < points; ++b) {
      const double fa = points > 1 ? double(a) / (points - 1) : 0.5;
      const double fb = points > 1 ? double(b) / (points - 1) : 0.5;
      const Vec2 p(box.low[0] + fa * (box.high[0] - box.low[0]), box.low[1] + fb * (box.high[1] - box.low[1]));
      for (std::size_t l = 0; l < n; ++l) {
        kvecs[l] = models_[l].kernel_vector(p);
        variances[static_cast<Eigen::Index>(l)] = models_[l].variance_from_kernel(kvecs[l]);
        stds.row(static_cast<Eigen::Index>(l)).setConstant(std::sqrt(variances[static_cast<Eigen::Index>(l)]));
        out.min_variance = std::min(out.min_variance, variances[static_cast<Eigen::Index>(l)]);
      }
      for (std::size_t r = 0; r < ensemble_.size(); ++r) {
        for (std::size_t i = 0; i < n; ++i) {
          const auto ii = static_cast<Eigen::Index>(i);
          if (agg == aggregation::Mode::Individual) {
            weights.setZero();
            weights[ii] = 1.0;
          } else {
            const Eigen::VectorXd row = ensemble_.self_looped(r).row(ii).transpose();
            if (agg == aggregation::Mode::CGP) {
              aggregator.cgp_weights(i, variances, row, weights);
            } else {
              aggregator.cora_weights(i, kvecs, row, weights);
            }
          }
          worst[i] = std::max(worst[i], aggregation::error_bound(weights, stds, out.phi).norm);
        }
      }
    }
  }
  double eta_sq = 0.0;
  for (double w : worst) eta_sq += w * w;
  const double eta_tilde = std::sqrt(eta_sq);

  const BoundConfig& bc = config_.bound;
  out.gamma = (bc.lipschitz_f + bc.lipschitz_mean) * bc.tau + std::sqrt(out.phi * bc.lipschitz_variance * bc.tau);
  out.variance_condition = out.min_variance >= out.gamma * out.gamma / out.phi;
  out.theorem = control::theorem1_check(ensemble_, config_.gains, 2,
                                        control::min_inertia_max_singular_value(config_.manipulator, config_.workspace),
                                        eta_tilde, config_.leader.peak_speed());
  return out;
}

RunResult run(const SimConfig& config, const RunOptions& options) {
  Experiment experiment(config);
  return experiment.run(config.mode, config.seed, options);
}

}  // namespace coragp::sim
