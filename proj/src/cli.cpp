// Copyright 2026 The ctxrec Authors
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

#include "ctxrec/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "ctxrec/clustering.hpp"
#include "ctxrec/error.hpp"

namespace ctxrec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

json world_json(const WorldConfig& w) {
  auto j = to_json(w);
  j.erase("seed");
  return j;
}

WorldConfig world_from(const json& doc, const WorldConfig& base, const char* section) {
  if (doc.is_object() && doc.contains("seed")) {
    throw ConfigError(std::string("config: ") + section + ".seed is not allowed, set seeds.world instead");
  }
  return world_config_from_json(doc, base);
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  return f;
}

void write_text(const fs::path& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

std::size_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
    throw ConfigError(std::string(what) + " grid values must be positive integers");
  }
  return static_cast<std::size_t>(v);
}

json summary_json(const EvalReport& rep) {
  json branches = json::object();
  for (std::size_t b = 0; b < kNumBranches; ++b) {
    branches[std::string(to_string(static_cast<Branch>(b)))] = rep.branch_counts[b];
  }
  json j = {{"policy", rep.policy},
            {"final_avg_ctr", rep.final_avg_ctr()},
            {"clicks", rep.clicks},
            {"displays", rep.displays},
            {"branch_counts", branches},
            {"config", rep.config}};
  j["retrieval_precision"] = rep.retrieval_precision ? json(*rep.retrieval_precision) : json(nullptr);
  return j;
}

void write_trial_log(std::ostream& out, const std::vector<TrialRecord>& log, const ContextModel& model) {
  out << "trial\tbranch\tlocation\ttime\tsocial\tshown\tclicks\n";
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& r = log[i];
    out << (i + 1) << '\t' << to_string(r.branch);
    for (std::size_t d = 0; d < kNumDimensions; ++d) out << '\t' << model[d].concept_at(r.situation[d]).id;
    out << '\t' << r.shown.size() << '\t' << r.total_clicks() << '\n';
  }
}

}  // namespace

WorldConfig RunConfig::default_sample_world() {
  WorldConfig w;
  w.groups = 10;
  w.situations_per_group = 50;
  w.documents = 100;
  w.hot_docs_per_group = 10;
  w.noise_prob = 0.1;
  return w;
}

void RunConfig::validate() const {
  auto unit = [](double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string("config: ") + what + " must lie in [0, 1]");
  };
  unit(epsilon, "epsilon");
  if (h_epsilon.empty()) throw ConfigError("config: h_epsilon must not be empty");
  for (double e : h_epsilon) unit(e, "h_epsilon entries");
  if (slate_size < 1) throw ConfigError("config: slate_size must be >= 1");
  if (!(threshold_b >= 0.0 && threshold_b <= 3.0)) throw ConfigError("config: threshold_b must lie in [0, 3]");
  if (nc < 1 || t_max < 1 || ct < 1 || restarts < 1) {
    throw ConfigError("config: nc, t_max, ct and restarts must be >= 1");
  }
  if (report_period < 1 || iterations < report_period) {
    throw ConfigError("config: need iterations >= report_period >= 1");
  }
  bool known = false;
  for (auto p : kPolicyNames) known = known || p == policy;
  if (!known) throw UnknownPolicy("unknown policy '" + policy + "'");
  world.validate();
  sample.validate();
}

json to_json(const RunConfig& c) {
  return {{"epsilon", c.epsilon},
          {"h_epsilon", c.h_epsilon},
          {"slate_size", c.slate_size},
          {"threshold_b", c.threshold_b},
          {"nc", c.nc},
          {"t_max", c.t_max},
          {"ct", c.ct},
          {"restarts", c.restarts},
          {"weight_window", c.weight_window},
          {"cold_start_fallback", c.cold_start_fallback},
          {"iterations", c.iterations},
          {"report_period", c.report_period},
          {"tuner_rounds", c.tuner_rounds},
          {"policy", c.policy},
          {"world", world_json(c.world)},
          {"sample", world_json(c.sample)},
          {"seeds",
           {{"world", c.seeds.world},
            {"policy", c.seeds.policy},
            {"eval", c.seeds.eval},
            {"clustering", c.seeds.clustering}}}};
}

RunConfig run_config_from_json(const json& doc, RunConfig c) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "epsilon", "h_epsilon",  "slate_size",    "threshold_b",  "nc",     "t_max", "ct",     "restarts",
      "weight_window", "cold_start_fallback", "iterations", "report_period", "tuner_rounds", "policy", "world",
      "sample", "seeds"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("epsilon", c.epsilon);
    get("h_epsilon", c.h_epsilon);
    get("slate_size", c.slate_size);
    get("threshold_b", c.threshold_b);
    get("nc", c.nc);
    get("t_max", c.t_max);
    get("ct", c.ct);
    get("restarts", c.restarts);
    get("weight_window", c.weight_window);
    get("cold_start_fallback", c.cold_start_fallback);
    get("iterations", c.iterations);
    get("report_period", c.report_period);
    get("tuner_rounds", c.tuner_rounds);
    get("policy", c.policy);
    if (doc.contains("world")) c.world = world_from(doc.at("world"), c.world, "world");
    if (doc.contains("sample")) c.sample = world_from(doc.at("sample"), c.sample, "sample");
    if (doc.contains("seeds")) {
      const auto& s = doc.at("seeds");
      if (!s.is_object()) throw ConfigError("config: seeds must be an object");
      for (const auto& [key, value] : s.items()) {
        if (key != "world" && key != "policy" && key != "eval" && key != "clustering") {
          throw ConfigError("config: unknown seed '" + key + "'");
        }
      }
      if (s.contains("world")) c.seeds.world = s.at("world").get<std::uint64_t>();
      if (s.contains("policy")) c.seeds.policy = s.at("policy").get<std::uint64_t>();
      if (s.contains("eval")) c.seeds.eval = s.at("eval").get<std::uint64_t>();
      if (s.contains("clustering")) c.seeds.clustering = s.at("clustering").get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read config " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  json doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) throw ParseError("config " + path.string() + " is not valid JSON");
  return run_config_from_json(doc);
}

void apply_master_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.seeds.world = splitmix64(seed ^ 0x1);
  cfg.seeds.policy = splitmix64(seed ^ 0x2);
  cfg.seeds.eval = splitmix64(seed ^ 0x3);
  cfg.seeds.clustering = splitmix64(seed ^ 0x4);
}

SyntheticWorld make_world(const RunConfig& cfg) {
  auto w = cfg.world;
  w.seed = cfg.seeds.world;
  return generate_world(w);
}

EngineConfig engine_config(const RunConfig& cfg) {
  EngineConfig e;
  e.bandit.epsilon = cfg.epsilon;
  e.bandit.slate_size = cfg.slate_size;
  e.bandit.threshold = cfg.threshold_b;
  e.bandit.cold_start_fallback = cfg.cold_start_fallback;
  e.clustering.num_clusters = cfg.nc;
  e.clustering.max_iterations = cfg.t_max;
  e.clustering.recluster_period = cfg.ct;
  e.clustering.restarts = cfg.restarts;
  e.clustering.seed = cfg.seeds.clustering;
  e.weight_window = cfg.weight_window;
  e.seed = cfg.seeds.policy;
  return e;
}

ReplayConfig replay_config(const RunConfig& cfg) { return {cfg.iterations, cfg.report_period, cfg.seeds.eval}; }

EvalReport run_simulation(const RunConfig& cfg, const SyntheticWorld& world, std::vector<TrialRecord>* log) {
  cfg.validate();
  auto policy = make_policy(cfg.policy, world, engine_config(cfg));
  return replay_evaluate(*policy, world, replay_config(cfg), log);
}

std::vector<ClusterEvalRow> run_cluster_eval(const RunConfig& cfg, const std::vector<std::size_t>& t_max_grid) {
  cfg.validate();
  auto wc = cfg.sample;
  wc.seed = cfg.seeds.world;
  const auto world = generate_world(wc);
  const auto sample = labeled_sample(world);
  const Alpha uniform{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::vector<ClusterEvalRow> rows;
  for (auto t : t_max_grid) {
    ClusteringConfig cc{cfg.nc, t, cfg.ct, cfg.restarts, cfg.seeds.clustering};
    const auto p = kmedoids(sample.situations, uniform, world.model, cc);
    rows.push_back({t, clustering_precision(p.assignment, sample.labels), p.iterations, p.converged, p.objective});
  }
  return rows;
}

TunerResult run_tuner(const RunConfig& cfg, const SyntheticWorld& world) {
  cfg.validate();
  auto policy = make_policy(cfg.policy, world, engine_config(cfg));
  auto* engine_policy = dynamic_cast<EnginePolicy*>(policy.get());
  if (!engine_policy) throw ConfigError("tune-epsilon needs an engine policy, not '" + cfg.policy + "'");
  ReplayStream stream(world, cfg.seeds.eval);
  Rng rng(splitmix64(cfg.seeds.policy ^ 0x7475));
  EpsilonTuner tuner(cfg.h_epsilon);
  TunerResult out;
  for (std::size_t t = 0; t < cfg.tuner_rounds; ++t) {
    out.rounds.push_back(tuner.step(
        [&](double eps) {
          engine_policy->engine().set_epsilon(eps);
          const auto& entry = stream.next();
          return static_cast<double>(engine_policy->run_trial(entry.situation, stream.feedback()).total_clicks());
        },
        rng));
    out.weights.push_back(tuner.weights());
  }
  out.chosen = tuner.argmax();
  out.epsilon = tuner.best_epsilon();
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("grid: bad number '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ConfigError("grid: bad number '" + s + "'");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("grid: range form is lo:hi:step");
    const double lo = number(parts[0]), hi = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || hi < lo) throw ConfigError("grid: need lo <= hi and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (count > 100000) throw ConfigError("grid: too many points");
    for (std::size_t i = 0; i < count; ++i) out.push_back(std::round((lo + step * static_cast<double>(i)) * 1e9) / 1e9);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) {
      out.push_back(number(p));
    }
  }
  if (out.empty()) throw ConfigError("grid: no values");
  return out;
}

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON run configuration");
  cmd->add_option("--seed", c.seed, "master seed; replaces all seeds of the config");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  if (c.seed) apply_master_seed(cfg, *c.seed);
  cfg.validate();
  return cfg;
}

void cmd_gen_data(const Common& c, std::ostream& out) {
  const auto cfg = resolve(c);
  const auto world = make_world(cfg);
  const fs::path dir = c.out;
  prepare_dir(dir);
  write_json(dir / "config.json", to_json(cfg));
  write_json(dir / "world.json", to_json(world));
  write_json(dir / "context.json", to_json(world.model));
  std::ostringstream sit, nav;
  write_diary_situations(sit, world);
  write_diary_navigation(nav, world, 5, cfg.seeds.eval);
  write_text(dir / "diary_situations.tsv", sit.str());
  write_text(dir / "diary_navigation.tsv", nav.str());
  out << "gen-data: " << world.pool.size() << " situations, " << world.documents.size() << " documents -> "
      << dir.string() << "\n";
}

void cmd_simulate(const Common& c, const std::optional<std::string>& policy, std::ostream& out) {
  auto cfg = resolve(c);
  if (policy) cfg.policy = *policy;
  cfg.validate();
  const auto world = make_world(cfg);
  std::vector<TrialRecord> log;
  const auto rep = run_simulation(cfg, world, &log);
  const fs::path dir = c.out;
  prepare_dir(dir);
  std::ostringstream report, trials;
  write_report_tsv(report, rep);
  write_trial_log(trials, log, world.model);
  write_text(dir / "report.tsv", report.str());
  write_text(dir / "trials.tsv", trials.str());
  auto summary = summary_json(rep);
  summary["run"] = to_json(cfg);
  write_json(dir / "summary.json", summary);
  out << "simulate: " << rep.policy << " avg_ctr " << fixed(rep.final_avg_ctr()) << " -> " << dir.string() << "\n";
}

void cmd_sweep(const Common& c, const std::optional<std::string>& policy, const std::string& param,
               const std::string& grid_text, std::ostream& out) {
  auto cfg = resolve(c);
  if (policy) cfg.policy = *policy;
  bool known = false;
  for (auto p : kSweepParams) known = known || p == param;
  if (!known) throw ConfigError("sweep: unknown parameter '" + param + "'");
  const auto grid = parse_grid(grid_text);
  const fs::path dir = c.out;
  std::ostringstream table;
  if (param == "t_max") {
    std::vector<std::size_t> ts;
    for (double v : grid) ts.push_back(as_count(v, "t_max"));
    table << "param\tvalue\tprecision\titerations\tconverged\tobjective\n";
    for (const auto& r : run_cluster_eval(cfg, ts)) {
      table << param << '\t' << r.t_max << '\t' << fixed(r.precision) << '\t' << r.iterations << '\t'
            << (r.converged ? 1 : 0) << '\t' << fixed(r.objective) << '\n';
    }
  } else {
    const auto world = make_world(cfg);
    table << "param\tvalue\tavg_ctr\tclicks\tdisplays";
    for (std::size_t b = 0; b < kNumBranches; ++b) table << '\t' << to_string(static_cast<Branch>(b));
    table << "\tretrieval_precision\n";
    for (double v : grid) {
      auto point = cfg;
      if (param == "epsilon") point.epsilon = v;
      if (param == "threshold_b") point.threshold_b = v;
      if (param == "ct") point.ct = as_count(v, "ct");
      point.validate();
      const auto rep = run_simulation(point, world);
      table << param << '\t' << (param == "ct" ? std::to_string(point.ct) : fixed(v)) << '\t'
            << fixed(rep.final_avg_ctr()) << '\t' << rep.clicks << '\t' << rep.displays;
      for (auto n : rep.branch_counts) table << '\t' << n;
      table << '\t' << (rep.retrieval_precision ? fixed(*rep.retrieval_precision) : std::string("NA")) << '\n';
    }
  }
  prepare_dir(dir);
  write_text(dir / ("sweep_" + param + ".tsv"), table.str());
  out << "sweep: " << grid.size() << " points of " << param << " -> " << dir.string() << "\n";
}

void cmd_tune(const Common& c, const std::optional<std::string>& grid_text, std::ostream& out) {
  auto cfg = resolve(c);
  if (grid_text) cfg.h_epsilon = parse_grid(*grid_text);
  cfg.validate();
  const auto world = make_world(cfg);
  const auto res = run_tuner(cfg, world);
  std::ostringstream trace;
  trace << "round\tindex\tepsilon\tclicks";
  for (std::size_t i = 0; i < cfg.h_epsilon.size(); ++i) trace << "\tw" << i;
  trace << '\n';
  for (std::size_t r = 0; r < res.rounds.size(); ++r) {
    const auto& rd = res.rounds[r];
    trace << (r + 1) << '\t' << rd.index << '\t' << fixed(rd.epsilon) << '\t' << fixed(rd.clicks, 0);
    for (double w : res.weights[r]) trace << '\t' << fixed(w, 0);
    trace << '\n';
  }
  const fs::path dir = c.out;
  prepare_dir(dir);
  write_text(dir / "tuner_trace.tsv", trace.str());
  json summary = {{"chosen_index", res.chosen},
                  {"epsilon", res.epsilon},
                  {"candidates", cfg.h_epsilon},
                  {"weights", res.weights.empty() ? std::vector<double>(cfg.h_epsilon.size(), 1.0) : res.weights.back()},
                  {"rounds", res.rounds.size()},
                  {"run", to_json(cfg)}};
  write_json(dir / "tuner_summary.json", summary);
  out << "tune-epsilon: epsilon " << fixed(res.epsilon, 2) << " -> " << dir.string() << "\n";
}

void cmd_cluster_eval(const Common& c, const std::optional<std::string>& grid_text, std::ostream& out) {
  const auto cfg = resolve(c);
  std::vector<std::size_t> ts;
  for (double v : parse_grid(grid_text.value_or("1,2,3,5,10,20,40,60,100"))) ts.push_back(as_count(v, "t_max"));
  std::ostringstream table;
  table << "t_max\tprecision\titerations\tconverged\tobjective\n";
  for (const auto& r : run_cluster_eval(cfg, ts)) {
    table << r.t_max << '\t' << fixed(r.precision) << '\t' << r.iterations << '\t' << (r.converged ? 1 : 0) << '\t'
          << fixed(r.objective) << '\n';
  }
  const fs::path dir = c.out;
  prepare_dir(dir);
  write_text(dir / "cluster_eval.tsv", table.str());
  out << "cluster-eval: " << ts.size() << " t_max values -> " << dir.string() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Context-aware recommendation with situation clustering and eps-greedy exploration", "ctxrec"};
  app.require_subcommand(1);

  Common gen, sim, sweep, tune, ceval;
  std::optional<std::string> sim_policy, sweep_policy, tune_grid, ceval_grid;
  std::string sweep_param, sweep_grid;

  auto* gen_cmd = app.add_subcommand("gen-data", "generate a synthetic world and diary exports");
  add_common(gen_cmd, gen);
  auto* sim_cmd = app.add_subcommand("simulate", "replay one policy and write its average CTR report");
  add_common(sim_cmd, sim);
  sim_cmd->add_option("--policy", sim_policy, "clustering-eps-greedy | eps-greedy | random | oracle");
  auto* sweep_cmd = app.add_subcommand("sweep", "run one experiment per grid value of a parameter");
  add_common(sweep_cmd, sweep);
  sweep_cmd->add_option("--policy", sweep_policy, "policy for epsilon, threshold_b and ct sweeps");
  sweep_cmd->add_option("--param", sweep_param, "epsilon | threshold_b | t_max | ct")->required();
  sweep_cmd->add_option("--grid", sweep_grid, "comma list or lo:hi:step")->required();
  auto* tune_cmd = app.add_subcommand("tune-epsilon", "select eps from the candidate set by click weights");
  add_common(tune_cmd, tune);
  tune_cmd->add_option("--grid", tune_grid, "candidate eps values, overrides h_epsilon");
  auto* ceval_cmd = app.add_subcommand("cluster-eval", "clustering precision on the labeled sample per t_max");
  add_common(ceval_cmd, ceval);
  ceval_cmd->add_option("--grid", ceval_grid, "t_max values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) cmd_gen_data(gen, out);
    if (*sim_cmd) cmd_simulate(sim, sim_policy, out);
    if (*sweep_cmd) cmd_sweep(sweep, sweep_policy, sweep_param, sweep_grid, out);
    if (*tune_cmd) cmd_tune(tune, tune_grid, out);
    if (*ceval_cmd) cmd_cluster_eval(ceval, ceval_grid, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ctxrec
