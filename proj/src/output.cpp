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

#include "coragp/output.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "coragp/error.hpp"
#include "json.hpp"

namespace coragp::io {

using nlohmann::json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

void write_trajectory_csv(std::ostream& out, const sim::TrajectoryLog& log, int agents) {
  out << "t,topology,error_norm";
  for (int i = 1; i <= agents; ++i) {
    for (const char* c : {"q1", "q2", "qdot1", "qdot2", "u1", "u2", "fhat1", "fhat2", "f1", "f2", "eta"}) {
      out << ',' << c << '_' << i;
    }
    for (int l = 1; l <= agents; ++l) out << ",h_" << i << '_' << l;
  }
  out << '\n';
  std::string line;
  auto put = [&](double v) {
    line += ',';
    line += format_number(v);
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const sim::Record& r : log) {
    line = format_number(r.t);
    line += ',';
    line += std::to_string(r.topology + 1);
    put(r.error_norm);
    for (int i = 0; i < agents; ++i) {
      const sim::AgentRecord& a = r.agents.at(static_cast<std::size_t>(i));
      for (const auto* v : {&a.q, &a.qdot, &a.u, &a.fhat, &a.f}) {
        put((*v)[0]);
        put((*v)[1]);
      }
      put(a.eta);
      for (int l = 0; l < agents; ++l) put(l < a.weights.size() ? a.weights[l] : nan);
    }
    line += '\n';
    out << line;
  }
}

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json summary_object(const sim::RunSummary& s) {
  return json{{"mode", std::string(sim::to_string(s.mode))},
              {"seed", s.seed},
              {"steps", s.steps},
              {"records", s.records},
              {"steady_mean_error", number(s.steady_mean_error)},
              {"steady_max_error", number(s.steady_max_error)},
              {"final_error", number(s.final_error)},
              {"coverage", number(s.coverage())},
              {"coverage_hits", s.coverage_hits},
              {"coverage_total", s.coverage_total},
              {"out_of_support_fraction", number(s.out_of_support_fraction)},
              {"degenerate_weights", s.degenerate_weights},
              {"variance_clamps", s.variance_clamps},
              {"topology_jumps", s.topology_jumps}};
}

json bounds_object(const sim::BoundSummary& b) {
  const auto& t = b.theorem;
  return json{{"phi1", {{number(t.phi1(0, 0)), number(t.phi1(0, 1))}, {number(t.phi1(1, 0)), number(t.phi1(1, 1))}}},
              {"phi1_positive_definite", t.is_pd},
              {"phi1_min_singular", number(t.phi1_min_singular)},
              {"phi2_norm", number(t.phi2_norm)},
              {"tracking_error_bound", number(t.error_bound)},
              {"ultimate_bound", number(t.ultimate_bound)},
              {"min_shifted_singular", number(t.min_shifted_singular)},
              {"min_laplacian_singular", number(t.min_laplacian_singular)},
              {"max_laplacian_singular", number(t.max_laplacian_singular)},
              {"min_inertia_max_singular", number(t.min_inertia_max_singular)},
              {"eta_tilde", number(t.eta_tilde)},
              {"leader_speed_bound", number(t.leader_speed_bound)},
              {"phi", number(b.phi)},
              {"min_variance", number(b.min_variance)},
              {"gamma", number(b.gamma)},
              {"variance_condition", b.variance_condition}};
}

}  // namespace

std::string summary_json(const sim::RunSummary& summary, const std::optional<sim::BoundSummary>& bounds) {
  json j{{"summary", summary_object(summary)}};
  j["bounds"] = bounds ? bounds_object(*bounds) : json(nullptr);
  return j.dump(2) + "\n";
}

std::string bounds_text(const sim::BoundSummary& b) {
  const auto& t = b.theorem;
  std::ostringstream out;
  out << "Phi1                     = [[" << format_number(t.phi1(0, 0)) << ", " << format_number(t.phi1(0, 1))
      << "], [" << format_number(t.phi1(1, 0)) << ", " << format_number(t.phi1(1, 1)) << "]]\n"
      << "is_pd                    = " << (t.is_pd ? "true" : "false") << "\n"
      << "sigma_min(Phi1)          = " << format_number(t.phi1_min_singular) << "\n"
      << "||Phi2||                 = " << format_number(t.phi2_norm) << "\n"
      << "tracking error bound     = " << format_number(t.error_bound) << "\n"
      << "ultimate bound (V)       = " << format_number(t.ultimate_bound) << "\n"
      << "min sigma_min(cL - aI)   = " << format_number(t.min_shifted_singular) << "\n"
      << "sigma range of L         = [" << format_number(t.min_laplacian_singular) << ", "
      << format_number(t.max_laplacian_singular) << "]\n"
      << "min_q sigma_max(H)       = " << format_number(t.min_inertia_max_singular) << "\n"
      << "eta_tilde                = " << format_number(t.eta_tilde) << "\n"
      << "leader speed bound       = " << format_number(t.leader_speed_bound) << "\n"
      << "phi                      = " << format_number(b.phi) << "\n"
      << "min posterior variance   = " << format_number(b.min_variance) << "\n"
      << "gamma                    = " << format_number(b.gamma) << "\n"
      << "variance condition       = " << (b.variance_condition ? "true" : "false") << "\n";
  return out.str();
}

void write_montecarlo_trials_csv(std::ostream& out, const sim::MonteCarloResult& result) {
  out << "trial,seed,mode,steady_mean_error,steady_max_error,final_error,coverage,out_of_support_fraction,"
         "degenerate_weights,topology_jumps\n";
  for (const sim::TrialResult& t : result.trials) {
    const auto& s = t.summary;
    out << t.trial << ',' << s.seed << ',' << sim::to_string(t.mode) << ',' << format_number(s.steady_mean_error)
        << ',' << format_number(s.steady_max_error) << ',' << format_number(s.final_error) << ','
        << format_number(s.coverage()) << ',' << format_number(s.out_of_support_fraction) << ','
        << s.degenerate_weights << ',' << s.topology_jumps << '\n';
  }
}

void write_montecarlo_summary_csv(std::ostream& out, const sim::MonteCarloResult& result) {
  out << "mode,trials,mean,median,stddev,ci_low,ci_high,coverage,tracking_error_bound,fraction_below_bound\n";
  for (std::size_t m = 0; m < result.modes.size(); ++m) {
    const sim::ModeStats& s = result.stats[m];
    out << sim::to_string(s.mode) << ',' << s.trials << ',' << format_number(s.mean) << ','
        << format_number(s.median) << ',' << format_number(s.stddev) << ',' << format_number(s.ci_low) << ','
        << format_number(s.ci_high) << ',' << format_number(s.coverage) << ',';
    if (result.bounds[m]) {
      out << format_number(result.bounds[m]->theorem.error_bound) << ','
          << format_number(sim::bound_fraction(result, s.mode));
    } else {
      out << "nan,nan";
    }
    out << '\n';
  }
}

std::string montecarlo_json(const sim::MonteCarloResult& result) {
  json modes = json::array();
  for (std::size_t m = 0; m < result.modes.size(); ++m) {
    const sim::ModeStats& s = result.stats[m];
    json entry{{"mode", std::string(sim::to_string(s.mode))},
               {"trials", s.trials},
               {"mean", number(s.mean)},
               {"median", number(s.median)},
               {"stddev", number(s.stddev)},
               {"ci95", {number(s.ci_low), number(s.ci_high)}},
               {"coverage", number(s.coverage)},
               {"degenerate_weights", s.degenerate_weights}};
    entry["bounds"] = result.bounds[m] ? bounds_object(*result.bounds[m]) : json(nullptr);
    if (result.bounds[m]) entry["fraction_below_bound"] = sim::bound_fraction(result, s.mode);
    modes.push_back(entry);
  }
  json trials = json::array();
  for (const sim::TrialResult& t : result.trials) {
    trials.push_back(json{{"trial", t.trial}, {"summary", summary_object(t.summary)}});
  }
  json j{{"modes", modes}, {"trials", trials}};
  const bool has_ordering = std::count(result.modes.begin(), result.modes.end(), sim::Predictor::WithoutGP) &&
                            std::count(result.modes.begin(), result.modes.end(), sim::Predictor::Individual);
  j["ordering_fraction"] = has_ordering ? json(sim::ordering_fraction(result)) : json(nullptr);
  return j.dump(2) + "\n";
}

void write_bench_csv(std::ostream& out, std::span<const sim::BenchRow> rows) {
  out << "mode,samples,repetitions,mean_ms,median_ms\n";
  for (const sim::BenchRow& r : rows) {
    out << sim::to_string(r.mode) << ',' << r.samples << ',';
    if (r.applicable) {
      out << r.repetitions << ',' << format_number(r.mean_ms) << ',' << format_number(r.median_ms);
    } else {
      out << "0,nan,nan";
    }
    out << '\n';
  }
}

std::string manifest_json(const RunManifest& m) {
  json outputs = json::object();
  for (const auto& [role, path] : m.outputs) outputs[role] = path.string();
  json j{{"command", m.command},   {"config_hash", m.config_hash}, {"seed", m.seed},
         {"version", m.version},   {"started", m.started},         {"finished", m.finished},
         {"outputs", outputs},     {"config", m.config}};
  return j.dump(2) + "\n";
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": cannot create directory: " + ec.message());
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) ensure_directory(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

}  // namespace coragp::io
