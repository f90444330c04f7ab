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

#include "coragp.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "coragp/bench.hpp"
#include "coragp/config.hpp"
#include "coragp/error.hpp"
#include "coragp/experiment.hpp"
#include "coragp/montecarlo.hpp"
#include "coragp/output.hpp"
#include "coragp/version.hpp"

struct cora_config {
  coragp::sim::SimConfig value;
};

struct cora_gp {
  coragp::gp::Model model;
};

namespace {

using namespace coragp;

thread_local std::string g_last_error;

cora_status fail(cora_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs body, translating exceptions to status codes.
template <typename Body>
cora_status guarded(Body&& body) {
  try {
    g_last_error.clear();
    body();
    return CORA_OK;
  } catch (const ConfigError& e) {
    return fail(CORA_ERR_CONFIG, e.what());
  } catch (const ValidationError& e) {
    return fail(CORA_ERR_VALIDATION, e.what());
  } catch (const NumericalError& e) {
    return fail(CORA_ERR_NUMERICAL, e.what());
  } catch (const FactorizationError& e) {
    return fail(CORA_ERR_NUMERICAL, e.what());
  } catch (const IoError& e) {
    return fail(CORA_ERR_IO, e.what());
  } catch (const ContractViolation& e) {
    return fail(CORA_ERR_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CORA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CORA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CORA_ERR_INTERNAL, "unknown error");
  }
}

std::vector<std::string> collect(const char* const* overrides, std::size_t n) {
  require(n == 0 || overrides != nullptr, "overrides pointer is null");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) {
    require(overrides[k] != nullptr, "override string is null");
    out.emplace_back(overrides[k]);
  }
  return out;
}

sim::Predictor to_predictor(cora_mode mode) {
  require(mode >= CORA_MODE_WITHOUT_GP && mode <= CORA_MODE_EXACT, "unknown mode");
  return static_cast<sim::Predictor>(mode);
}

cora_mode to_mode(sim::Predictor p) { return static_cast<cora_mode>(static_cast<int>(p)); }

sim::Predictor resolve(const cora_config* config, cora_mode mode) {
  return mode == CORA_MODE_CONFIG ? config->value.mode : to_predictor(mode);
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void fill(const sim::BoundSummary& b, cora_bound_report* r) {
  const auto& t = b.theorem;
  r->phi1[0] = t.phi1(0, 0);
  r->phi1[1] = t.phi1(0, 1);
  r->phi1[2] = t.phi1(1, 0);
  r->phi1[3] = t.phi1(1, 1);
  r->phi1_positive_definite = t.is_pd ? 1 : 0;
  r->phi1_min_singular = t.phi1_min_singular;
  r->phi2_norm = t.phi2_norm;
  r->tracking_error_bound = t.error_bound;
  r->ultimate_bound = t.ultimate_bound;
  r->min_shifted_singular = t.min_shifted_singular;
  r->min_laplacian_singular = t.min_laplacian_singular;
  r->max_laplacian_singular = t.max_laplacian_singular;
  r->min_inertia_max_singular = t.min_inertia_max_singular;
  r->eta_tilde = t.eta_tilde;
  r->leader_speed_bound = t.leader_speed_bound;
  r->phi = b.phi;
  r->min_variance = b.min_variance;
  r->gamma = b.gamma;
  r->variance_condition = b.variance_condition ? 1 : 0;
}

void fill(const sim::RunSummary& s, cora_run_summary* r) {
  r->mode = to_mode(s.mode);
  r->seed = s.seed;
  r->steps = s.steps;
  r->records = s.records;
  r->steady_mean_error = s.steady_mean_error;
  r->steady_max_error = s.steady_max_error;
  r->final_error = s.final_error;
  r->coverage = s.coverage();
  r->out_of_support_fraction = s.out_of_support_fraction;
  r->degenerate_weights = s.degenerate_weights;
  r->topology_jumps = s.topology_jumps;
}

io::RunManifest start_manifest(const char* command, const sim::SimConfig& config) {
  io::RunManifest m;
  m.command = command;
  m.config_hash = sim::config_hash(config);
  m.seed = config.seed;
  m.version = kVersion;
  m.started = io::utc_timestamp();
  m.config = sim::serialize_config(config);
  return m;
}

template <typename Writer>
void emit(io::RunManifest& manifest, const std::filesystem::path& dir, const char* role, const char* name,
          Writer&& writer) {
  std::ostringstream out;
  writer(out);
  io::write_file(dir / name, out.str());
  manifest.outputs.emplace_back(role, dir / name);
}

void finish_manifest(io::RunManifest& manifest, const std::filesystem::path& dir) {
  io::write_file(dir / "config.preset", manifest.config);
  manifest.outputs.emplace_back("config", dir / "config.preset");
  manifest.outputs.emplace_back("manifest", dir / "manifest.json");
  manifest.finished = io::utc_timestamp();
  io::write_file(dir / "manifest.json", io::manifest_json(manifest));
}

}  // namespace

extern "C" {

const char* cora_version(void) { return coragp::kVersion; }

const char* cora_last_error(void) { return g_last_error.c_str(); }

const char* cora_mode_name(cora_mode mode) {
  if (mode < CORA_MODE_WITHOUT_GP || mode > CORA_MODE_EXACT) return "";
  return sim::to_string(static_cast<sim::Predictor>(mode)).data();
}

cora_status cora_mode_from_name(const char* name, cora_mode* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    const auto p = sim::predictor_from_string(name);
    require(p.has_value(), std::string("unknown mode '") + name + "'");
    *out = to_mode(*p);
  });
}

cora_status cora_config_load(const char* path, const char* const* overrides, size_t n, cora_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    const auto list = collect(overrides, n);
    auto config = std::make_unique<cora_config>(cora_config{sim::load_config(path, list)});
    *out = config.release();
  });
}

cora_status cora_config_parse(const char* text, const char* const* overrides, size_t n, cora_config** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    const auto list = collect(overrides, n);
    auto config = std::make_unique<cora_config>(cora_config{sim::parse_config(text, list)});
    *out = config.release();
  });
}

void cora_config_free(cora_config* config) { delete config; }

cora_status cora_config_set_seed(cora_config* config, uint64_t seed) {
  return guarded([&] {
    require(config != nullptr, "null config");
    config->value.seed = seed;
  });
}

uint64_t cora_config_seed(const cora_config* config) { return config ? config->value.seed : 0; }

int cora_config_agents(const cora_config* config) { return config ? config->value.agents() : 0; }

cora_mode cora_config_mode(const cora_config* config) {
  return config ? to_mode(config->value.mode) : CORA_MODE_CONFIG;
}

cora_status cora_config_serialize(const cora_config* config, char** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    *out = duplicate(sim::serialize_config(config->value));
  });
}

cora_status cora_config_hash(const cora_config* config, char out[17]) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    const std::string h = sim::config_hash(config->value);
    std::memcpy(out, h.c_str(), 17);
  });
}

void cora_string_free(char* s) { std::free(s); }

cora_status cora_validate(const cora_config* config, cora_mode mode, cora_bound_report* report, char** text) {
  return guarded([&] {
    require(config != nullptr, "null config");
    if (text) *text = nullptr;
    config->value.validate();
    sim::Experiment experiment(config->value);
    const sim::BoundSummary b = experiment.bound_summary(resolve(config, mode));
    if (report) fill(b, report);
    if (text) *text = duplicate(io::bounds_text(b));
  });
}

cora_status cora_run(const cora_config* config, cora_mode mode, const char* out_dir, cora_run_summary* summary) {
  return guarded([&] {
    require(config != nullptr, "null config");
    io::RunManifest manifest = start_manifest("run", config->value);
    const sim::Predictor p = resolve(config, mode);
    sim::Experiment experiment(config->value);
    sim::RunOptions options;
    options.store_log = out_dir != nullptr;
    const sim::RunResult result = experiment.run(p, config->value.seed, options);
    if (summary) fill(result.summary, summary);
    if (!out_dir) return;
    const std::filesystem::path dir(out_dir);
    io::ensure_directory(dir);
    emit(manifest, dir, "trajectory", "trajectory.csv",
         [&](std::ostream& o) { io::write_trajectory_csv(o, result.log, config->value.agents()); });
    emit(manifest, dir, "summary", "summary.json",
         [&](std::ostream& o) { o << io::summary_json(result.summary, result.bounds); });
    finish_manifest(manifest, dir);
  });
}

cora_status cora_montecarlo(const cora_config* config, int trials, const char* out_dir, cora_mode_stats* stats,
                            size_t capacity, size_t* count, double* ordering) {
  return guarded([&] {
    require(config != nullptr, "null config");
    io::RunManifest manifest = start_manifest("montecarlo", config->value);
    sim::Experiment experiment(config->value);
    sim::MonteCarloOptions options;
    options.trials = trials;
    const sim::MonteCarloResult result = sim::monte_carlo(experiment, options);
    const std::size_t modes = result.modes.size();
    if (count) *count = modes;
    require(stats == nullptr || capacity >= modes, "stats buffer too small");
    for (std::size_t m = 0; stats && m < modes; ++m) {
      const sim::ModeStats& s = result.stats[m];
      cora_mode_stats& r = stats[m];
      r.mode = to_mode(s.mode);
      r.trials = s.trials;
      r.mean = s.mean;
      r.median = s.median;
      r.stddev = s.stddev;
      r.ci_low = s.ci_low;
      r.ci_high = s.ci_high;
      r.coverage = s.coverage;
      r.has_bound = result.bounds[m] ? 1 : 0;
      r.tracking_error_bound = result.bounds[m] ? result.bounds[m]->theorem.error_bound : 0.0;
      r.fraction_below_bound = result.bounds[m] ? sim::bound_fraction(result, s.mode) : 0.0;
    }
    if (ordering) {
      const auto has = [&](sim::Predictor p) {
        return std::find(result.modes.begin(), result.modes.end(), p) != result.modes.end();
      };
      *ordering = has(sim::Predictor::WithoutGP) && has(sim::Predictor::Individual) ? sim::ordering_fraction(result)
                                                                                     : -1.0;
    }
    if (!out_dir) return;
    const std::filesystem::path dir(out_dir);
    io::ensure_directory(dir);
    emit(manifest, dir, "trials", "montecarlo_trials.csv",
         [&](std::ostream& o) { io::write_montecarlo_trials_csv(o, result); });
    emit(manifest, dir, "statistics", "montecarlo_summary.csv",
         [&](std::ostream& o) { io::write_montecarlo_summary_csv(o, result); });
    emit(manifest, dir, "summary", "summary.json", [&](std::ostream& o) { o << io::montecarlo_json(result); });
    finish_manifest(manifest, dir);
  });
}

cora_status cora_bench(const cora_config* config, const int* sample_sizes, size_t n_sizes, int repetitions,
                       const char* out_dir, cora_bench_row* rows, size_t capacity, size_t* count) {
  return guarded([&] {
    require(config != nullptr, "null config");
    require(n_sizes == 0 || sample_sizes != nullptr, "null sample sizes");
    io::RunManifest manifest = start_manifest("bench", config->value);
    sim::BenchOptions options = sim::bench_options(config->value);
    if (n_sizes > 0) options.sample_sizes.assign(sample_sizes, sample_sizes + n_sizes);
    if (repetitions > 0) options.repetitions = repetitions;
    const auto result = sim::bench_weights(options);
    if (count) *count = result.size();
    require(rows == nullptr || capacity >= result.size(), "rows buffer too small");
    for (std::size_t k = 0; rows && k < result.size(); ++k) {
      rows[k].mode = to_mode(result[k].mode);
      rows[k].samples = result[k].samples;
      rows[k].applicable = result[k].applicable ? 1 : 0;
      rows[k].repetitions = result[k].repetitions;
      rows[k].mean_ms = result[k].mean_ms;
      rows[k].median_ms = result[k].median_ms;
    }
    if (!out_dir) return;
    const std::filesystem::path dir(out_dir);
    io::ensure_directory(dir);
    emit(manifest, dir, "bench", "bench.csv", [&](std::ostream& o) { io::write_bench_csv(o, result); });
    finish_manifest(manifest, dir);
  });
}

cora_status cora_loglog_slope(const double* x, const double* y, size_t n, double* slope) {
  return guarded([&] {
    require(x != nullptr && y != nullptr && slope != nullptr, "null argument");
    *slope = sim::loglog_slope(std::span<const double>(x, n), std::span<const double>(y, n));
  });
}

cora_status cora_gp_fit(const double* inputs, size_t m, size_t d, const double* targets, size_t k,
                        double signal_std, const double* inv_lengthscales, double noise_std, cora_gp** out) {
  return guarded([&] {
    require(inputs != nullptr && targets != nullptr && inv_lengthscales != nullptr && out != nullptr,
            "null argument");
    require(m > 0 && d > 0 && k > 0, "empty dimensions");
    *out = nullptr;
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto rows = static_cast<Eigen::Index>(m);
    const Eigen::MatrixXd x = Eigen::Map<const RowMajor>(inputs, rows, static_cast<Eigen::Index>(d));
    const Eigen::MatrixXd y = Eigen::Map<const RowMajor>(targets, rows, static_cast<Eigen::Index>(k));
    gp::KernelParams params;
    params.signal_std = signal_std;
    params.noise_std = noise_std;
    params.inv_lengthscales = Eigen::Map<const Eigen::VectorXd>(inv_lengthscales, static_cast<Eigen::Index>(d));
    auto model = std::make_unique<cora_gp>(cora_gp{gp::Model::fit(x, y, params)});
    *out = model.release();
  });
}

void cora_gp_free(cora_gp* gp) { delete gp; }

size_t cora_gp_size(const cora_gp* gp) { return gp ? static_cast<size_t>(gp->model.size()) : 0; }

cora_status cora_gp_predict(const cora_gp* gp, const double* point, double* mean, double* variance) {
  return guarded([&] {
    require(gp != nullptr && point != nullptr && mean != nullptr, "null argument");
    const Eigen::Map<const Eigen::VectorXd> p(point, gp->model.dim());
    const gp::Prediction pred = gp->model.predict(p, variance != nullptr);
    Eigen::Map<Eigen::VectorXd>(mean, gp->model.outputs()) = pred.mean;
    if (variance) *variance = pred.std[0] * pred.std[0];
  });
}

cora_status cora_gp_kernel_vector(const cora_gp* gp, const double* point, double* out) {
  return guarded([&] {
    require(gp != nullptr && point != nullptr && out != nullptr, "null argument");
    const Eigen::Map<const Eigen::VectorXd> p(point, gp->model.dim());
    Eigen::Map<Eigen::VectorXd> k(out, gp->model.size());
    gp->model.kernel_vector(p, k);
  });
}

cora_status cora_aggregate(const cora_gp* const* gps, size_t n, size_t agent, const double* adjacency_row,
                           cora_mode mode, double sigma_g, const double* point, double* weights, double* mean) {
  return guarded([&] {
    require(gps != nullptr && adjacency_row != nullptr && point != nullptr && weights != nullptr && mean != nullptr,
            "null argument");
    require(n > 0 && agent < n, "agent index out of range");
    const auto agg = sim::aggregation_mode(to_predictor(mode));
    require(agg.has_value(), "mode has no aggregation weights");
    const auto size = static_cast<Eigen::Index>(n);
    for (size_t l = 0; l < n; ++l) require(gps[l] != nullptr, "null GP handle");
    const Eigen::Index dim = gps[0]->model.dim();
    const Eigen::Index outputs = gps[0]->model.outputs();
    const Eigen::Map<const Eigen::VectorXd> p(point, dim);
    const Eigen::Map<const Eigen::VectorXd> row(adjacency_row, size);

    std::vector<Eigen::VectorXd> kvecs(n);
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(size, outputs);
    Eigen::VectorXd variances = Eigen::VectorXd::Zero(size);
    Eigen::VectorXd scratch(outputs);
    for (size_t l = 0; l < n; ++l) {
      const auto li = static_cast<Eigen::Index>(l);
      const gp::Model& m = gps[l]->model;
      require(m.dim() == dim && m.outputs() == outputs, "GP handles disagree in dimensions");
      kvecs[l] = m.kernel_vector(p);
      m.mean_from_kernel(kvecs[l], scratch);
      means.row(li) = scratch.transpose();
      if (*agg == aggregation::Mode::CGP) variances[li] = m.variance_from_kernel(kvecs[l]);
    }
    Eigen::Map<Eigen::VectorXd> h(weights, size);
    switch (*agg) {
      case aggregation::Mode::Individual:
        h.setZero();
        h[static_cast<Eigen::Index>(agent)] = 1.0;
        break;
      case aggregation::Mode::CGP:
        h = aggregation::cgp_weights(agent, variances, row, 1e-12);
        break;
      default: {
        aggregation::Aggregator aggregator(aggregation::AggregationMode{*agg, sigma_g, 1e-12});
        Eigen::VectorXd w(size);
        aggregator.cora_weights(agent, kvecs, row, w);
        h = w;
      }
    }
    Eigen::Map<Eigen::VectorXd>(mean, outputs) = aggregation::aggregate_mean(h, means);
  });
}

}  // extern "C"
