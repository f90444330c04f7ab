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

#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string output;
};

// Runs the CLI with stderr folded into the captured output.
Outcome cli(const std::string& args) {
  const std::string cmd = std::string(CORAGP_CLI) + " " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) o.output += buf.data();
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string preset(const std::string& name) { return std::string(CORAGP_PRESET_DIR) + "/" + name; }
std::string data(const std::string& name) { return std::string(CORAGP_TEST_DATA_DIR) + "/" + name; }

std::string scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("coragp_cli_" + name);
  fs::remove_all(p);
  return p.string();
}

std::vector<std::string> lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("cli: validate exit codes") {
  for (const char* p : {"paperV.preset", "tiny.preset"}) {
    const Outcome o = cli("validate --config " + preset(p));
    INFO(o.output);
    CHECK(o.code == 0);
    CHECK(o.output.find("Assumption 1") != std::string::npos);
    CHECK(o.output.find("is_pd") != std::string::npos);
    CHECK(o.output.find("tracking error bound") != std::string::npos);
  }
  const Outcome bad = cli("validate --config " + data("disconnected.preset"));
  CHECK(bad.code == 3);
  CHECK(bad.output.find("Assumption 1") != std::string::npos);
  CHECK(bad.output.find("follower(s) 3") != std::string::npos);

  CHECK(cli("validate --config " + data("malformed.preset")).code == 2);
  CHECK(cli("validate --config /nonexistent.preset").code == 2);
  CHECK(cli("validate --config " + preset("tiny.preset") + " --override gains.alpha=-1").code == 2);
  CHECK(cli("validate").code == 2);
  CHECK(cli("frobnicate --config x").code == 2);
  CHECK(cli("--version").code == 0);
}

TEST_CASE("cli: an override changes only its own line of the echoed config") {
  const std::string a = scratch("mode_a"), b = scratch("mode_b");
  REQUIRE(cli("run --config " + preset("tiny.preset") + " --override horizon=0.1 --out " + a).code == 0);
  REQUIRE(cli("run --config " + preset("tiny.preset") + " --override horizon=0.1 --override mode=CGP --out " + b).code ==
          0);
  const auto la = lines(a + "/config.preset"), lb = lines(b + "/config.preset");
  REQUIRE(la.size() == lb.size());
  int differing = 0;
  for (std::size_t k = 0; k < la.size(); ++k) {
    if (la[k] != lb[k]) {
      ++differing;
      CHECK(la[k] == "mode: CoraAvg");
      CHECK(lb[k] == "mode: CGP");
    }
  }
  CHECK(differing == 1);
  for (const char* f : {"trajectory.csv", "summary.json", "manifest.json"}) CHECK(fs::exists(fs::path(a) / f));
  // Trajectory: header plus floor(T/dt) + 1 records.
  CHECK(lines(a + "/trajectory.csv").size() == 102);
}

TEST_CASE("cli: a one-trial Monte-Carlo batch reproduces the single run") {
  const std::string r = scratch("single"), m = scratch("mc1");
  const std::string base = " --config " + preset("tiny.preset") + " --override horizon=0.5 --seed 12";
  REQUIRE(cli("run" + base + " --out " + r).code == 0);
  REQUIRE(cli("montecarlo" + base + " --override montecarlo.modes=[CoraAvg] --trials 1 --out " + m).code == 0);
  const auto trials = lines(m + "/montecarlo_trials.csv");
  REQUIRE(trials.size() == 2);
  const auto header = split(trials[0]);
  const auto row = split(trials[1]);
  CHECK(row[1] == "12");
  CHECK(row[2] == "CoraAvg");
  std::ifstream in(r + "/summary.json");
  std::stringstream js;
  js << in.rdbuf();
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == "steady_mean_error" || header[k] == "final_error") {
      const std::string key = "\"" + header[k] + "\": ";
      const auto at = js.str().find(key);
      REQUIRE(at != std::string::npos);
      CHECK(std::stod(js.str().substr(at + key.size())) == std::stod(row[k]));
    }
  }
}

TEST_CASE("cli: bench emits one row per mode and sample size") {
  const std::string b = scratch("bench");
  const Outcome o = cli("bench --config " + preset("tiny.preset") + " --m-grid 20,40,80 --reps 5 --out " + b);
  INFO(o.output);
  REQUIRE(o.code == 0);
  const auto rows = lines(b + "/bench.csv");
  REQUIRE(rows.size() == 1 + 4 * 3);
  CHECK(rows[0] == "mode,samples,repetitions,mean_ms,median_ms");
  int applicable = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) applicable += split(rows[k])[3] != "nan";
  CHECK(applicable == 9);
}
