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

// Command-line front end. Talks to the library only through coragp.h.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "coragp.h"

namespace {

struct Common {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
  long long seed = -1;
};

int exit_code(cora_status status) {
  switch (status) {
    case CORA_OK: return 0;
    case CORA_ERR_CONFIG: return 2;
    case CORA_ERR_VALIDATION: return 3;
    case CORA_ERR_NUMERICAL: return 4;
    default: return 1;
  }
}

int report(cora_status status, const char* what) {
  if (status != CORA_OK) std::cerr << "coragp " << what << ": error: " << cora_last_error() << "\n";
  return exit_code(status);
}

void add_common(CLI::App* cmd, Common& c, bool with_out) {
  cmd->add_option("--config", c.config, "Configuration file (.preset)")->required();
  cmd->add_option("--seed", c.seed, "Override the recorded seed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--override", c.overrides, "dotted.key=value (repeatable)")->take_all();
  if (with_out) cmd->add_option("--out", c.out, "Output directory (default: $CORAGP_OUT_DIR, then ./coragp-out/<command>)");
}

std::string output_dir(const Common& c, const char* command) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("CORAGP_OUT_DIR"); env && *env) return env;
  return std::string("coragp-out/") + command;
}

// Loads the config with the overrides; --seed is applied as one more override.
cora_status load(const Common& c, cora_config** config) {
  std::vector<std::string> all = c.overrides;
  if (c.seed >= 0) all.push_back("seed=" + std::to_string(c.seed));
  std::vector<const char*> ptrs;
  for (const auto& s : all) ptrs.push_back(s.c_str());
  return cora_config_load(c.config.c_str(), ptrs.data(), ptrs.size(), config);
}

void print_hash(const cora_config* config) {
  char hash[17] = {0};
  if (cora_config_hash(config, hash) == CORA_OK) {
    std::printf("config hash %s, seed %llu\n", hash, static_cast<unsigned long long>(cora_config_seed(config)));
  }
}

int cmd_run(const Common& c) {
  cora_config* config = nullptr;
  if (cora_status s = load(c, &config); s != CORA_OK) return report(s, "run");
  print_hash(config);
  const std::string dir = output_dir(c, "run");
  cora_run_summary summary{};
  const cora_status s = cora_run(config, CORA_MODE_CONFIG, dir.c_str(), &summary);
  cora_config_free(config);
  if (s != CORA_OK) return report(s, "run");
  std::printf("mode %s: steady-state mean |e| = %.6g, max = %.6g, final = %.6g\n", cora_mode_name(summary.mode),
              summary.steady_mean_error, summary.steady_max_error, summary.final_error);
  std::printf("records %ld, topology jumps %ld, bound coverage %.4f, out-of-support queries %.4f\n",
              summary.records, summary.topology_jumps, summary.coverage, summary.out_of_support_fraction);
  std::printf("outputs written to %s\n", dir.c_str());
  return 0;
}

int cmd_montecarlo(const Common& c, int trials) {
  cora_config* config = nullptr;
  if (cora_status s = load(c, &config); s != CORA_OK) return report(s, "montecarlo");
  print_hash(config);
  const std::string dir = output_dir(c, "montecarlo");
  std::vector<cora_mode_stats> stats(8);
  size_t count = 0;
  double ordering = -1.0;
  const cora_status s =
      cora_montecarlo(config, trials, dir.c_str(), stats.data(), stats.size(), &count, &ordering);
  cora_config_free(config);
  if (s != CORA_OK) return report(s, "montecarlo");
  std::printf("%-10s %6s %12s %12s %25s %10s\n", "mode", "trials", "mean", "median", "95% CI", "below bnd");
  for (size_t k = 0; k < count; ++k) {
    const auto& m = stats[k];
    char below[32] = "-";
    if (m.has_bound) std::snprintf(below, sizeof below, "%.3f", m.fraction_below_bound);
    std::printf("%-10s %6d %12.6g %12.6g   [%10.6g, %10.6g] %10s\n", cora_mode_name(m.mode), m.trials, m.mean,
                m.median, m.ci_low, m.ci_high, below);
  }
  if (ordering >= 0.0) std::printf("expected error ordering holds in %.1f%% of trials\n", 100.0 * ordering);
  std::printf("outputs written to %s\n", dir.c_str());
  return 0;
}

int cmd_bench(const Common& c, const std::vector<int>& grid, int reps) {
  cora_config* config = nullptr;
  if (cora_status s = load(c, &config); s != CORA_OK) return report(s, "bench");
  const std::string dir = output_dir(c, "bench");
  std::vector<cora_bench_row> rows(64 * (grid.empty() ? 5 : grid.size()));
  size_t count = 0;
  const cora_status s = cora_bench(config, grid.empty() ? nullptr : grid.data(), grid.size(), reps, dir.c_str(),
                                   rows.data(), rows.size(), &count);
  cora_config_free(config);
  if (s != CORA_OK) return report(s, "bench");
  std::printf("%-10s %6s %14s %14s\n", "mode", "M", "mean ms", "median ms");
  for (size_t k = 0; k < count; ++k) {
    const auto& r = rows[k];
    if (r.applicable) {
      std::printf("%-10s %6d %14.6g %14.6g\n", cora_mode_name(r.mode), r.samples, r.mean_ms, r.median_ms);
    } else {
      std::printf("%-10s %6d %14s %14s\n", cora_mode_name(r.mode), r.samples, "-", "-");
    }
  }
  std::printf("outputs written to %s\n", dir.c_str());
  return 0;
}

int cmd_validate(const Common& c) {
  cora_config* config = nullptr;
  if (cora_status s = load(c, &config); s != CORA_OK) return report(s, "validate");
  print_hash(config);
  cora_bound_report bounds{};
  char* text = nullptr;
  const cora_status s = cora_validate(config, CORA_MODE_CONFIG, &bounds, &text);
  if (s != CORA_OK) {
    cora_config_free(config);
    return report(s, "validate");
  }
  std::printf("Assumption 1 (leader-rooted spanning tree in every graph): ok\n");
  std::printf("Assumption 2 (irreducible jump chain): ok\n");
  std::printf("stability report for mode %s\n", cora_mode_name(cora_config_mode(config)));
  std::fputs(text, stdout);
  cora_string_free(text);
  cora_config_free(config);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative GP learning for leader-follower tracking of Euler-Lagrange agents"};
  app.set_version_flag("--version", std::string(cora_version()));
  app.require_subcommand(1);

  Common run_opts, mc_opts, bench_opts, validate_opts;
  int trials = 0;
  std::vector<int> grid;
  int reps = 0;

  auto* run = app.add_subcommand("run", "Simulate one closed-loop run");
  add_common(run, run_opts, true);
  auto* mc = app.add_subcommand("montecarlo", "Seeded Monte-Carlo batch over the configured modes");
  add_common(mc, mc_opts, true);
  mc->add_option("--trials", trials, "Number of trials (default: montecarlo.trials)")->check(CLI::PositiveNumber);
  auto* bench = app.add_subcommand("bench", "Time the aggregation weights over a grid of sample sizes");
  add_common(bench, bench_opts, true);
  bench->add_option("--m-grid", grid, "Sample sizes, e.g. 100,200,400,800")->delimiter(',');
  bench->add_option("--reps", reps, "Timed queries per (mode, M)")->check(CLI::PositiveNumber);
  auto* validate = app.add_subcommand("validate", "Check the preconditions and print the stability report");
  add_common(validate, validate_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*run) return cmd_run(run_opts);
  if (*mc) return cmd_montecarlo(mc_opts, trials);
  if (*bench) return cmd_bench(bench_opts, grid, reps);
  return cmd_validate(validate_opts);
}
