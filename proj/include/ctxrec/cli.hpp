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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctxrec/simdata.hpp"

namespace ctxrec {

struct RunSeeds {
  std::uint64_t world = 1;
  std::uint64_t policy = 2;
  std::uint64_t eval = 3;
  std::uint64_t clustering = 4;
};

/// Every hyperparameter of a run. Loaded from a JSON object whose keys match
/// the field names; missing keys keep these defaults and unknown keys are
/// rejected.
struct RunConfig {
  double epsilon = 0.1;
  std::vector<double> h_epsilon = default_epsilon_candidates();
  std::size_t slate_size = 10;   // N
  double threshold_b = 2.4;      // B
  std::size_t nc = 10;           // Nc
  std::size_t t_max = 60;
  std::size_t ct = 40;
  std::size_t restarts = 10;
  std::size_t weight_window = 0;  // 0 keeps every gamma
  bool cold_start_fallback = true;
  std::size_t iterations = 10000;
  std::size_t report_period = 1000;
  std::size_t tuner_rounds = 1000;  // n
  std::string policy = "clustering-eps-greedy";
  WorldConfig world;
  /// Labeled world for cluster-eval: 10 groups x 50 noisy situations.
  WorldConfig sample = default_sample_world();
  RunSeeds seeds;

  static WorldConfig default_sample_world();
  /// Throws ConfigError on any out-of-range field.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& doc, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Replaces all four seeds with values derived from one master seed.
void apply_master_seed(RunConfig& cfg, std::uint64_t seed);

/// Builds the world named by the config (its seed comes from seeds.world).
SyntheticWorld make_world(const RunConfig& cfg);
EngineConfig engine_config(const RunConfig& cfg);
ReplayConfig replay_config(const RunConfig& cfg);

/// Replays the configured policy on `world`.
EvalReport run_simulation(const RunConfig& cfg, const SyntheticWorld& world, std::vector<TrialRecord>* log = nullptr);

struct ClusterEvalRow {
  std::size_t t_max = 0;
  double precision = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double objective = 0.0;
};
/// Clusters the labeled sample once per t_max value.
std::vector<ClusterEvalRow> run_cluster_eval(const RunConfig& cfg, const std::vector<std::size_t>& t_max_grid);

struct TunerResult {
  std::vector<EpsilonTuner::Round> rounds;
  std::vector<std::vector<double>> weights;  // after each round
  std::size_t chosen = 0;
  double epsilon = 0.0;
};
/// Epsilon tuning on the configured world: every round picks a candidate eps, runs
/// one trial of the configured engine with it and adds the trial's clicks.
TunerResult run_tuner(const RunConfig& cfg, const SyntheticWorld& world);

/// "a,b,c" or "lo:hi:step" (inclusive). Throws ConfigError on bad input or an
/// empty grid.
std::vector<double> parse_grid(const std::string& text);

inline constexpr std::array<std::string_view, 4> kSweepParams = {"epsilon", "threshold_b", "t_max", "ct"};

/// Entry point behind the ctxrec binary: gen-data, simulate, sweep,
/// tune-epsilon, cluster-eval. Returns the process exit status; documented
/// errors are reported on `err` with status 1, usage errors with status 2.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ctxrec
