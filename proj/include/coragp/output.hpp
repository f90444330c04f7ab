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

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coragp/bench.hpp"
#include "coragp/experiment.hpp"
#include "coragp/montecarlo.hpp"

namespace coragp::io {

/// 17 significant digits; "nan" / "inf" / "-inf" for non-finite values.
std::string format_number(double value);

/// Current UTC time as ISO 8601 with milliseconds.
std::string utc_timestamp();

/// Columns: t, topology, error_norm, then per agent i (1-based)
/// q1_i, q2_i, qdot1_i, qdot2_i, u1_i, u2_i, fhat1_i, fhat2_i, f1_i, f2_i,
/// eta_i, h_i_1 .. h_i_n. Missing values are written as nan.
void write_trajectory_csv(std::ostream& out, const sim::TrajectoryLog& log, int agents);

std::string summary_json(const sim::RunSummary& summary, const std::optional<sim::BoundSummary>& bounds);
std::string bounds_text(const sim::BoundSummary& bounds);

void write_montecarlo_trials_csv(std::ostream& out, const sim::MonteCarloResult& result);
void write_montecarlo_summary_csv(std::ostream& out, const sim::MonteCarloResult& result);
std::string montecarlo_json(const sim::MonteCarloResult& result);

void write_bench_csv(std::ostream& out, std::span<const sim::BenchRow> rows);

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
  std::string started;
  std::string finished;
  std::vector<std::pair<std::string, std::filesystem::path>> outputs;  // (role, path)
  std::string config;  // canonical text
};

std::string manifest_json(const RunManifest& manifest);

/// Creates parent directories as needed; throws IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);
void ensure_directory(const std::filesystem::path& dir);

}  // namespace coragp::io
