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

#include "coragp/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "coragp/error.hpp"

namespace coragp::sim {

namespace {

constexpr Predictor kAllPredictors[] = {Predictor::WithoutGP, Predictor::Individual, Predictor::CGP,
                                        Predictor::CoraTop,   Predictor::CoraAvg,    Predictor::Exact};

}  // namespace

std::string_view to_string(Predictor p) {
  switch (p) {
    case Predictor::WithoutGP: return "WithoutGP";
    case Predictor::Individual: return "Individual";
    case Predictor::CGP: return "CGP";
    case Predictor::CoraTop: return "CoraTop";
    case Predictor::CoraAvg: return "CoraAvg";
    case Predictor::Exact: return "Exact";
  }
  return "?";
}

std::optional<Predictor> predictor_from_string(std::string_view name) {
  for (Predictor p : kAllPredictors) {
    if (to_string(p) == name) return p;
  }
  if (name == "IGP") return Predictor::Individual;
  return std::nullopt;
}

std::optional<aggregation::Mode> aggregation_mode(Predictor p) {
  switch (p) {
    case Predictor::Individual: return aggregation::Mode::Individual;
    case Predictor::CGP: return aggregation::Mode::CGP;
    case Predictor::CoraTop: return aggregation::Mode::CoraTop;
    case Predictor::CoraAvg: return aggregation::Mode::CoraAvg;
    default: return std::nullopt;
  }
}

std::string_view to_string(Integrator i) { return i == Integrator::RK4 ? "RK4" : "Euler"; }

bool Box::contains(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  return (p.array() >= low.array()).all() && (p.array() <= high.array()).all();
}

long SimConfig::steps() const {
  const double ratio = horizon / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<long>(nearest);
  return static_cast<long>(std::floor(ratio));
}

aggregation::BoundParams SimConfig::bound_params() const {
  aggregation::BoundParams p;
  p.delta = bound.delta;
  p.tau = bound.tau;
  p.domain_diameter = domain_diameter();
  p.state_dim = 2;
  p.agents = agents();
  return p;
}

void SimConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  const int n = agents();
  check(n >= 1, "data.samples: at least one agent is required");
  check(horizon > 0.0 && std::isfinite(horizon), "horizon: must be positive");
  check(dt > 0.0 && dt <= horizon, "dt: must be positive and not exceed the horizon");
  check(epsilon > 0.0, "epsilon: must be positive");
  for (int m : data.samples) check(m >= 1, "data.samples: every M_i must be at least 1");
  check(data.box.dim() == 2 && data.box.high.size() == 2, "data.box: must be two-dimensional");
  check((data.box.high.array() > data.box.low.array()).all(), "data.box: empty box");
  check(data.noise_std >= 0.0, "data.noise_std: must be nonnegative");
  check(data.region_fraction >= 0.0 && data.region_fraction <= 1.0, "data.region_fraction: must lie in [0, 1]");
  check(data.regions.empty() || static_cast<int>(data.regions.size()) == n,
        "data.regions: need one region per agent");
  for (const Box& b : data.regions) {
    check(b.dim() == 2 && b.high.size() == 2 && (b.high.array() > b.low.array()).all(),
          "data.regions: every region must be a nonempty 2-D box");
  }
  check(initial.q_high >= initial.q_low && initial.qdot_high >= initial.qdot_low, "initial: empty box");
  check(kernel.dim() == 2, "kernel.inv_lengthscales: exactly two entries (joint positions) are required");
  try {
    kernel.validate();
    manipulator.validate();
    gains.validate(n);
    bound_params().validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  check(bound.grid_points >= 1, "bound.grid_points: must be positive");
  check(bound.stride >= 0, "bound.stride: must be nonnegative");
  check(workspace.points >= 1 && workspace.high >= workspace.low, "workspace: invalid grid");
  check(trials >= 1, "montecarlo.trials: must be at least 1");
  check(!topology.graphs.empty(), "topology.graphs: at least one graph is required");
  for (const auto& g : topology.graphs) {
    check(g.size() == n, "topology.graphs: graph '" + g.name + "' does not match the agent count");
  }
  const auto states = static_cast<Eigen::Index>(topology.graphs.size());
  check(topology.transition.rows() == states && topology.transition.cols() == states,
        "topology.transition: must be N x N for N graphs");
  check(topology.initial_distribution.size() == states, "topology.initial_distribution: one entry per graph");
  check(topology.rate > 0.0, "topology.rate: must be positive");

  // Structural preconditions.
  for (const auto& g : topology.graphs) {
    const auto missing = topology::unreachable_followers(g);
    if (!missing.empty()) {
      std::ostringstream msg;
      msg << "Assumption 1 violated (leader-rooted spanning tree): graph '" << g.name << "' leaves follower(s)";
      for (auto i : missing) msg << ' ' << (i + 1);
      msg << " unreachable from the leader";
      throw ValidationError(msg.str());
    }
  }
  topology::validate_transition_matrix(topology.transition);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) const {
    std::ostringstream msg;
    msg << source_;
    const YAML::Mark mark = node.Mark();
    if (mark.line >= 0) msg << ":" << (mark.line + 1) << ":" << (mark.column + 1);
    msg << ": field '" << field << "': " << what;
    throw ConfigError(msg.str());
  }

  void expect_map(const YAML::Node& node, const std::string& field, std::initializer_list<const char*> keys) const {
    if (!node.IsMap()) fail(node, field, "expected a mapping");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, join(field, key), "unknown key");
    }
  }

  static std::string join(const std::string& field, const std::string& key) {
    return field.empty() ? key : field + "." + key;
  }

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, field, "cannot convert '" + node.Scalar() + "'");
    }
  }

  template <typename T>
  void optional(const YAML::Node& parent, const std::string& field, const char* key, T& out) const {
    const YAML::Node node = parent[key];
    if (node) out = scalar<T>(node, join(field, key));
  }

  std::vector<double> doubles(const YAML::Node& node, const std::string& field) const {
    if (!node.IsSequence()) fail(node, field, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < node.size(); ++k) {
      out.push_back(scalar<double>(node[k], field + "[" + std::to_string(k) + "]"));
    }
    return out;
  }

  Eigen::VectorXd vector(const YAML::Node& node, const std::string& field) const {
    const auto v = doubles(node, field);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  std::pair<double, double> range(const YAML::Node& node, const std::string& field) const {
    const auto v = doubles(node, field);
    if (v.size() != 2) fail(node, field, "expected [low, high]");
    if (v[1] < v[0]) fail(node, field, "high is below low");
    return {v[0], v[1]};
  }

  Box box(const YAML::Node& node, const std::string& field) const {
    expect_map(node, field, {"low", "high"});
    if (!node["low"] || !node["high"]) fail(node, field, "both low and high are required");
    Box b{vector(node["low"], join(field, "low")), vector(node["high"], join(field, "high"))};
    if (b.low.size() != b.high.size()) fail(node, field, "low and high differ in length");
    return b;
  }

  Predictor predictor(const YAML::Node& node, const std::string& field) const {
    const auto name = scalar<std::string>(node, field);
    const auto p = predictor_from_string(name);
    if (!p) fail(node, field, "unknown mode '" + name + "' (WithoutGP, Individual, CGP, CoraTop, CoraAvg, Exact)");
    return *p;
  }

 private:
  std::string source_;
};

topology::Digraph read_graph(const Reader& rd, const YAML::Node& node, const std::string& field, int agents,
                             std::size_t index) {
  rd.expect_map(node, field, {"name", "leader", "edges", "bidirectional"});
  std::string name = "G" + std::to_string(index + 1);
  rd.optional(node, field, "name", name);
  Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(agents, agents);
  Eigen::VectorXd leader = Eigen::VectorXd::Zero(agents);

  auto agent = [&](const YAML::Node& v, const std::string& f) {
    const int a = rd.scalar<int>(v, f);
    if (a < 1 || a > agents) rd.fail(v, f, "agent index must lie in 1.." + std::to_string(agents));
    return a - 1;
  };
  auto weight = [&](const YAML::Node& entry, std::size_t pos, const std::string& f) {
    if (entry.size() <= pos) return 1.0;
    const double w = rd.scalar<double>(entry[pos], f);
    if (!(w > 0.0)) rd.fail(entry[pos], f, "edge weight must be positive");
    return w;
  };

  if (const YAML::Node links = node["leader"]) {
    if (!links.IsSequence()) rd.fail(links, field + ".leader", "expected a list");
    for (std::size_t k = 0; k < links.size(); ++k) {
      const std::string f = field + ".leader[" + std::to_string(k) + "]";
      const YAML::Node e = links[k];
      if (e.IsSequence()) {
        if (e.size() < 1 || e.size() > 2) rd.fail(e, f, "expected agent or [agent, weight]");
        leader[agent(e[0], f)] = weight(e, 1, f);
      } else {
        leader[agent(e, f)] = 1.0;
      }
    }
  }
  auto read_edges = [&](const char* key, bool both_ways) {
    const YAML::Node edges = node[key];
    if (!edges) return;
    const std::string base = Reader::join(field, key);
    if (!edges.IsSequence()) rd.fail(edges, base, "expected a list of [from, to(, weight)]");
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const std::string f = base + "[" + std::to_string(k) + "]";
      const YAML::Node e = edges[k];
      if (!e.IsSequence() || e.size() < 2 || e.size() > 3) rd.fail(e, f, "expected [from, to] or [from, to, weight]");
      const int from = agent(e[0], f);
      const int to = agent(e[1], f);
      if (from == to) rd.fail(e, f, "self-loops are implicit and may not be listed");
      const double w = weight(e, 2, f);
      adjacency(to, from) = w;
      if (both_ways) adjacency(from, to) = w;
    }
  };
  read_edges("edges", false);
  read_edges("bidirectional", true);
  return topology::Digraph(name, adjacency, leader);
}

SimConfig decode(const YAML::Node& root, const Reader& rd) {
  SimConfig c;
  rd.expect_map(root, "",
                {"seed", "horizon", "dt", "integrator", "mode", "prediction_hold", "settle_time", "epsilon", "gains",
                 "kernel", "bound", "manipulator", "leader", "data", "initial", "workspace", "montecarlo", "topology"});
  rd.optional(root, "", "seed", c.seed);
  rd.optional(root, "", "horizon", c.horizon);
  rd.optional(root, "", "dt", c.dt);
  if (const YAML::Node n = root["integrator"]) {
    const auto name = rd.scalar<std::string>(n, "integrator");
    if (name == "RK4") c.integrator = Integrator::RK4;
    else if (name == "Euler") c.integrator = Integrator::Euler;
    else rd.fail(n, "integrator", "expected RK4 or Euler");
  }
  if (const YAML::Node n = root["mode"]) c.mode = rd.predictor(n, "mode");
  rd.optional(root, "", "prediction_hold", c.prediction_hold);
  rd.optional(root, "", "settle_time", c.settle_time);
  rd.optional(root, "", "epsilon", c.epsilon);

  // data comes first: the agent count sizes everything else.
  const YAML::Node data = root["data"];
  if (!data) rd.fail(root, "data", "section is required");
  rd.expect_map(data, "data", {"samples", "box", "noise_std", "region_fraction", "regions"});
  if (!data["samples"]) rd.fail(data, "data.samples", "is required");
  {
    const auto v = rd.doubles(data["samples"], "data.samples");
    c.data.samples.clear();
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (v[k] < 1 || v[k] != std::floor(v[k])) rd.fail(data["samples"][k], "data.samples", "expected positive integers");
      c.data.samples.push_back(static_cast<int>(v[k]));
    }
    if (c.data.samples.empty()) rd.fail(data["samples"], "data.samples", "at least one agent is required");
  }
  const int n = c.agents();
  if (data["box"]) c.data.box = rd.box(data["box"], "data.box");
  rd.optional(data, "data", "noise_std", c.data.noise_std);
  rd.optional(data, "data", "region_fraction", c.data.region_fraction);
  if (const YAML::Node regions = data["regions"]) {
    if (!regions.IsSequence()) rd.fail(regions, "data.regions", "expected a list of boxes");
    for (std::size_t k = 0; k < regions.size(); ++k) {
      c.data.regions.push_back(rd.box(regions[k], "data.regions[" + std::to_string(k) + "]"));
    }
  }

  c.gains.c = Eigen::VectorXd::Constant(n, 2.0);
  if (const YAML::Node g = root["gains"]) {
    rd.expect_map(g, "gains", {"alpha", "c", "sigma_g"});
    rd.optional(g, "gains", "alpha", c.gains.alpha);
    rd.optional(g, "gains", "sigma_g", c.gains.sigma_g);
    if (const YAML::Node cn = g["c"]) {
      if (cn.IsScalar()) {
        c.gains.c = Eigen::VectorXd::Constant(n, rd.scalar<double>(cn, "gains.c"));
      } else {
        c.gains.c = rd.vector(cn, "gains.c");
        if (c.gains.c.size() != n) rd.fail(cn, "gains.c", "expected one gain per agent or a single number");
      }
    }
  }
  if (const YAML::Node k = root["kernel"]) {
    rd.expect_map(k, "kernel", {"signal_std", "inv_lengthscales", "noise_std"});
    rd.optional(k, "kernel", "signal_std", c.kernel.signal_std);
    rd.optional(k, "kernel", "noise_std", c.kernel.noise_std);
    if (k["inv_lengthscales"]) c.kernel.inv_lengthscales = rd.vector(k["inv_lengthscales"], "kernel.inv_lengthscales");
  }
  if (const YAML::Node b = root["bound"]) {
    rd.expect_map(b, "bound", {"delta", "tau", "domain_diameter", "grid_points", "stride", "lipschitz_f",
                               "lipschitz_mean", "lipschitz_variance"});
    rd.optional(b, "bound", "delta", c.bound.delta);
    rd.optional(b, "bound", "tau", c.bound.tau);
    rd.optional(b, "bound", "domain_diameter", c.bound.domain_diameter);
    rd.optional(b, "bound", "grid_points", c.bound.grid_points);
    rd.optional(b, "bound", "stride", c.bound.stride);
    rd.optional(b, "bound", "lipschitz_f", c.bound.lipschitz_f);
    rd.optional(b, "bound", "lipschitz_mean", c.bound.lipschitz_mean);
    rd.optional(b, "bound", "lipschitz_variance", c.bound.lipschitz_variance);
  }
  if (const YAML::Node m = root["manipulator"]) {
    rd.expect_map(m, "manipulator", {"mass1", "mass2", "length1", "length2", "gravity"});
    rd.optional(m, "manipulator", "mass1", c.manipulator.mass1);
    rd.optional(m, "manipulator", "mass2", c.manipulator.mass2);
    rd.optional(m, "manipulator", "length1", c.manipulator.length1);
    rd.optional(m, "manipulator", "length2", c.manipulator.length2);
    rd.optional(m, "manipulator", "gravity", c.manipulator.gravity);
  }
  if (const YAML::Node l = root["leader"]) {
    rd.expect_map(l, "leader", {"radius", "angular_rate"});
    rd.optional(l, "leader", "radius", c.leader.radius);
    rd.optional(l, "leader", "angular_rate", c.leader.angular_rate);
  }
  if (const YAML::Node i = root["initial"]) {
    rd.expect_map(i, "initial", {"q", "qdot"});
    if (i["q"]) std::tie(c.initial.q_low, c.initial.q_high) = rd.range(i["q"], "initial.q");
    if (i["qdot"]) std::tie(c.initial.qdot_low, c.initial.qdot_high) = rd.range(i["qdot"], "initial.qdot");
  }
  if (const YAML::Node w = root["workspace"]) {
    rd.expect_map(w, "workspace", {"points", "low", "high"});
    rd.optional(w, "workspace", "points", c.workspace.points);
    rd.optional(w, "workspace", "low", c.workspace.low);
    rd.optional(w, "workspace", "high", c.workspace.high);
  }
  if (const YAML::Node mc = root["montecarlo"]) {
    rd.expect_map(mc, "montecarlo", {"trials", "modes"});
    rd.optional(mc, "montecarlo", "trials", c.trials);
    if (const YAML::Node modes = mc["modes"]) {
      if (!modes.IsSequence() || modes.size() == 0) rd.fail(modes, "montecarlo.modes", "expected a nonempty list");
      c.modes.clear();
      for (std::size_t k = 0; k < modes.size(); ++k) c.modes.push_back(rd.predictor(modes[k], "montecarlo.modes"));
    }
  }

  const YAML::Node t = root["topology"];
  if (!t) rd.fail(root, "topology", "section is required");
  rd.expect_map(t, "topology", {"rate", "initial_distribution", "transition", "normalize_tolerance", "graphs"});
  rd.optional(t, "topology", "rate", c.topology.rate);
  const YAML::Node graphs = t["graphs"];
  if (!graphs || !graphs.IsSequence() || graphs.size() == 0) rd.fail(t, "topology.graphs", "expected a nonempty list");
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    c.topology.graphs.push_back(read_graph(rd, graphs[k], "topology.graphs[" + std::to_string(k) + "]", n, k));
  }
  const auto states = static_cast<Eigen::Index>(c.topology.graphs.size());
  c.topology.initial_distribution = Eigen::VectorXd::Constant(states, 1.0 / static_cast<double>(states));
  if (t["initial_distribution"]) {
    c.topology.initial_distribution = rd.vector(t["initial_distribution"], "topology.initial_distribution");
  }
  double tolerance = 0.0;
  rd.optional(t, "topology", "normalize_tolerance", tolerance);
  const YAML::Node tr = t["transition"];
  if (!tr) rd.fail(t, "topology.transition", "is required");
  if (!tr.IsSequence() || static_cast<Eigen::Index>(tr.size()) != states) {
    rd.fail(tr, "topology.transition", "expected one row per graph");
  }
  c.topology.transition.resize(states, states);
  for (Eigen::Index r = 0; r < states; ++r) {
    const std::string f = "topology.transition[" + std::to_string(r) + "]";
    const Eigen::VectorXd row = rd.vector(tr[static_cast<std::size_t>(r)], f);
    if (row.size() != states) rd.fail(tr[static_cast<std::size_t>(r)], f, "row length must equal the graph count");
    c.topology.transition.row(r) = row.transpose();
    // Printed matrices are often rounded; rows within the tolerance are
    // renormalized, anything further off is left for validation to reject.
    const double sum = row.sum();
    if (std::abs(sum - 1.0) > 1e-12 && std::abs(sum - 1.0) <= tolerance && sum > 0.0) {
      c.topology.transition.row(r) /= sum;
    }
  }
  return c;
}

YAML::Node encode(const SimConfig& c) {
  YAML::Node root;
  auto list = [](const Eigen::VectorXd& v) {
    YAML::Node n(YAML::NodeType::Sequence);
    for (Eigen::Index k = 0; k < v.size(); ++k) n.push_back(v[k]);
    n.SetStyle(YAML::EmitterStyle::Flow);
    return n;
  };
  auto box = [&](const Box& b) {
    YAML::Node n;
    n["low"] = list(b.low);
    n["high"] = list(b.high);
    n.SetStyle(YAML::EmitterStyle::Flow);
    return n;
  };
  auto pair = [&](double a, double b) { return list(Eigen::Vector2d(a, b)); };

  root["seed"] = c.seed;
  root["horizon"] = c.horizon;
  root["dt"] = c.dt;
  root["integrator"] = std::string(to_string(c.integrator));
  root["mode"] = std::string(to_string(c.mode));
  root["prediction_hold"] = c.prediction_hold;
  root["settle_time"] = c.settle_time;
  root["epsilon"] = c.epsilon;
  root["gains"]["alpha"] = c.gains.alpha;
  root["gains"]["c"] = list(c.gains.c);
  root["gains"]["sigma_g"] = c.gains.sigma_g;
  root["kernel"]["signal_std"] = c.kernel.signal_std;
  root["kernel"]["inv_lengthscales"] = list(c.kernel.inv_lengthscales);
  root["kernel"]["noise_std"] = c.kernel.noise_std;
  root["bound"]["delta"] = c.bound.delta;
  root["bound"]["tau"] = c.bound.tau;
  root["bound"]["domain_diameter"] = c.bound.domain_diameter;
  root["bound"]["grid_points"] = c.bound.grid_points;
  root["bound"]["stride"] = c.bound.stride;
  root["bound"]["lipschitz_f"] = c.bound.lipschitz_f;
  root["bound"]["lipschitz_mean"] = c.bound.lipschitz_mean;
  root["bound"]["lipschitz_variance"] = c.bound.lipschitz_variance;
  root["manipulator"]["mass1"] = c.manipulator.mass1;
  root["manipulator"]["mass2"] = c.manipulator.mass2;
  root["manipulator"]["length1"] = c.manipulator.length1;
  root["manipulator"]["length2"] = c.manipulator.length2;
  root["manipulator"]["gravity"] = c.manipulator.gravity;
  root["leader"]["radius"] = c.leader.radius;
  root["leader"]["angular_rate"] = c.leader.angular_rate;
  {
    YAML::Node samples(YAML::NodeType::Sequence);
    for (int m : c.data.samples) samples.push_back(m);
    samples.SetStyle(YAML::EmitterStyle::Flow);
    root["data"]["samples"] = samples;
  }
  root["data"]["box"] = box(c.data.box);
  root["data"]["noise_std"] = c.data.noise_std;
  root["data"]["region_fraction"] = c.data.region_fraction;
  if (!c.data.regions.empty()) {
    YAML::Node regions(YAML::NodeType::Sequence);
    for (const Box& b : c.data.regions) regions.push_back(box(b));
    root["data"]["regions"] = regions;
  }
  root["initial"]["q"] = pair(c.initial.q_low, c.initial.q_high);
  root["initial"]["qdot"] = pair(c.initial.qdot_low, c.initial.qdot_high);
  root["workspace"]["points"] = c.workspace.points;
  root["workspace"]["low"] = c.workspace.low;
  root["workspace"]["high"] = c.workspace.high;
  root["montecarlo"]["trials"] = c.trials;
  {
    YAML::Node modes(YAML::NodeType::Sequence);
    for (Predictor p : c.modes) modes.push_back(std::string(to_string(p)));
    modes.SetStyle(YAML::EmitterStyle::Flow);
    root["montecarlo"]["modes"] = modes;
  }
  YAML::Node t = root["topology"];
  t["rate"] = c.topology.rate;
  t["initial_distribution"] = list(c.topology.initial_distribution);
  {
    YAML::Node rows(YAML::NodeType::Sequence);
    for (Eigen::Index r = 0; r < c.topology.transition.rows(); ++r) {
      rows.push_back(list(c.topology.transition.row(r).transpose()));
    }
    t["transition"] = rows;
  }
  YAML::Node graphs(YAML::NodeType::Sequence);
  for (const auto& g : c.topology.graphs) {
    YAML::Node gn;
    gn["name"] = g.name;
    YAML::Node leader(YAML::NodeType::Sequence);
    YAML::Node edges(YAML::NodeType::Sequence);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (g.leader_links[i] > 0.0) leader.push_back(list(Eigen::Vector2d(double(i + 1), g.leader_links[i])));
    }
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (g.adjacency(i, j) > 0.0) edges.push_back(list(Eigen::Vector3d(double(j + 1), double(i + 1), g.adjacency(i, j))));
      }
    }
    leader.SetStyle(YAML::EmitterStyle::Flow);
    edges.SetStyle(YAML::EmitterStyle::Flow);
    gn["leader"] = leader;
    gn["edges"] = edges;
    graphs.push_back(gn);
  }
  t["graphs"] = graphs;
  return root;
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "': expected KEY=VALUE");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  YAML::Node parsed;
  try {
    parsed = YAML::Load(value);
  } catch (const YAML::Exception& e) {
    throw ConfigError("override '" + key + "': cannot parse value: " + e.msg);
  }
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError("override '" + key + "': empty path component");
    parts.push_back(part);
  }
  YAML::Node cursor = root;
  for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
    YAML::Node next = cursor[parts[k]];
    if (next && !next.IsMap()) throw ConfigError("override '" + key + "': '" + parts[k] + "' is not a section");
    cursor.reset(next);
  }
  cursor[parts.back()] = parsed;
}

SimConfig finish(const YAML::Node& root, std::span<const std::string> overrides, std::string_view source) {
  // Cloning drops source marks, so keep the parsed tree when nothing changes.
  YAML::Node tree = overrides.empty() ? root : YAML::Clone(root);
  for (const std::string& o : overrides) apply_override(tree, o);
  Reader reader{std::string(source)};
  SimConfig config = decode(tree, reader);
  config.validate();
  return config;
}

}  // namespace

SimConfig parse_config(std::string_view text, std::span<const std::string> overrides, std::string_view source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    std::ostringstream msg;
    msg << source << ":" << (e.mark.line + 1) << ":" << (e.mark.column + 1) << ": syntax error: " << e.msg;
    throw ConfigError(msg.str());
  }
  if (!root.IsMap()) throw ConfigError(std::string(source) + ": top level must be a mapping");
  return finish(root, overrides, source);
}

SimConfig load_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), overrides, path.string());
}

SimConfig apply_overrides(const SimConfig& config, std::span<const std::string> overrides) {
  return parse_config(serialize_config(config), overrides, "<config>");
}

std::string serialize_config(const SimConfig& config) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << encode(config);
  return std::string(out.c_str()) + "\n";
}

std::string config_hash(const SimConfig& config) {
  const std::string text = serialize_config(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace coragp::sim
