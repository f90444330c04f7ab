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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coragp/aggregation.hpp"
#include "coragp/control.hpp"
#include "coragp/dynamics.hpp"
#include "coragp/gp.hpp"
#include "coragp/topology.hpp"

namespace coragp::sim {

/// How an agent estimates the disturbance. WithoutGP uses fhat = 0 and Exact
/// uses the true disturbance (a diagnostic reference, not a learner).
enum class Predictor { WithoutGP, Individual, CGP, CoraTop, CoraAvg, Exact };

std::string_view to_string(Predictor p);
std::optional<Predictor> predictor_from_string(std::string_view name);
/// Aggregation mode behind a GP predictor; nullopt for WithoutGP / Exact.
std::optional<aggregation::Mode> aggregation_mode(Predictor p);

enum class Integrator { RK4, Euler };
std::string_view to_string(Integrator i);

struct Box {
  Eigen::VectorXd low;
  Eigen::VectorXd high;

  Eigen::Index dim() const { return low.size(); }
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& p) const;
  double diameter() const { return (high - low).norm(); }
};

struct DataConfig {
  std::vector<int> samples{350, 250, 300, 250};
  Box box{Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Constant(2, 1.0)};
  double noise_std = 0.1;
  // Optional per-agent sampling regions; a region_fraction share of agent i's
  // samples comes from regions[i], the rest from the whole box.
  std::vector<Box> regions;
  double region_fraction = 1.0;
};

struct TopologyConfig {
  std::vector<topology::Digraph> graphs;
  Eigen::MatrixXd transition;
  double rate = 0.5;
  Eigen::VectorXd initial_distribution;
};

struct BoundConfig {
  double delta = 0.05;
  double tau = 1e-3;
  double domain_diameter = 0.0;  // 0: diagonal of the data box
  int grid_points = 21;          // per axis, over the data box
  int stride = 10;               // steps between logged error bounds; 0 disables
  double lipschitz_f = 10.0;
  double lipschitz_mean = 10.0;
  double lipschitz_variance = 10.0;
};

struct InitialConfig {
  double q_low = 0.0;
  double q_high = 1.6;
  double qdot_low = -0.8;
  double qdot_high = 0.8;
};

struct SimConfig {
  double horizon = 100.0;
  double dt = 1e-3;
  Integrator integrator = Integrator::RK4;
  Predictor mode = Predictor::CoraAvg;
  bool prediction_hold = true;  // evaluate fhat once per step, hold across RK stages
  double settle_time = -1.0;    // negative: horizon / 2
  double epsilon = 1e-12;
  control::ControlGains gains;
  gp::KernelParams kernel;
  BoundConfig bound;
  dynamics::ELParams manipulator;
  dynamics::LeaderTrajectory leader;
  DataConfig data;
  InitialConfig initial;
  TopologyConfig topology;
  control::WorkspaceGrid workspace;
  int trials = 20;
  std::vector<Predictor> modes{Predictor::WithoutGP, Predictor::Individual, Predictor::CGP, Predictor::CoraTop,
                               Predictor::CoraAvg};
  std::uint64_t seed = 1;

  int agents() const { return static_cast<int>(data.samples.size()); }
  double settle() const { return settle_time < 0.0 ? 0.5 * horizon : settle_time; }
  long steps() const;
  double domain_diameter() const { return bound.domain_diameter > 0.0 ? bound.domain_diameter : data.box.diameter(); }
  aggregation::BoundParams bound_params() const;

  /// Range and consistency checks (ConfigError), then structural checks on
  /// the topology (ValidationError).
  void validate() const;
};

/// Parses the structured-text (YAML) configuration. Each override is
/// "dotted.key=value"; the value is read as YAML so lists work too.
SimConfig parse_config(std::string_view text, std::span<const std::string> overrides = {},
                       std::string_view source = "<config>");
SimConfig load_config(const std::filesystem::path& path, std::span<const std::string> overrides = {});
SimConfig apply_overrides(const SimConfig& config, std::span<const std::string> overrides);

/// Canonical text form: fixed key order, 17 significant digits.
std::string serialize_config(const SimConfig& config);
/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const SimConfig& config);

}  // namespace coragp::sim
