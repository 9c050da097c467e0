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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "ctxrec/casebase.hpp"
#include "ctxrec/clustering.hpp"

namespace ctxrec {

using Rng = std::mt19937_64;

struct BanditConfig {
  double epsilon = 0.1;          // probability of an exploratory pick
  std::size_t slate_size = 10;   // N
  double threshold = 2.4;        // B, on the unweighted similarity sum
  /// Below-threshold trials get a uniform random slate (ColdStart) instead of
  /// nothing (NoRecommend), so the replay keeps receiving feedback.
  bool cold_start_fallback = true;

  void validate() const;
};

enum class Branch { HlcsGreedy, EpsGreedy, ColdStart, NoRecommend };
inline constexpr std::size_t kNumBranches = 4;

std::string_view to_string(Branch b);

struct TrialRecord {
  Situation situation;
  std::vector<DocId> shown;
  std::map<DocId, std::uint64_t> clicks;  // recommendation clicks, keys within `shown`
  Branch branch = Branch::ColdStart;
  std::optional<std::size_t> retrieved;  // case index
  double similarity = 0.0;               // unweighted, 0 without retrieval
  UpdateKind update = UpdateKind::Inserted;
  bool reclustered = false;

  std::uint64_t total_clicks() const;
};

/// Recommendation clicks over impressions, capped at 1. Zero without impressions.
double get_ctr(const DocumentStats& ds);

struct Selection {
  std::vector<DocId> docs;
  std::vector<bool> exploratory;  // parallel to docs
};

/// Slate of min(N, |candidates|) distinct documents. Each slot draws q ~ U[0,1):
/// q > epsilon takes the highest-CTR remaining candidate (ties to the lowest
/// doc id), otherwise a uniformly random remaining one.
Selection epsilon_greedy(const UserPreferences& candidates, std::size_t slate_size, double epsilon, Rng& rng);

/// Deterministic top-N by CTR, ties to the lowest doc id.
std::vector<DocId> greedy_top_n(const UserPreferences& candidates, std::size_t slate_size);

/// min(N, |pool|) distinct documents drawn uniformly.
std::vector<DocId> random_slate(std::span<const DocId> pool, std::size_t slate_size, Rng& rng);

struct Recommendation {
  std::vector<DocId> docs;
  Branch branch;
};

/// Gate on the threshold, then greedy for critical situations (marking the
/// current one critical too) or epsilon-greedy otherwise. The retrieved case's
/// preferences are the candidate set in both cases.
Recommendation recommend_documents(CaseBase& cb, const Situation& current, const std::optional<Retrieval>& retrieved,
                                   const BanditConfig& cfg, std::span<const DocId> pool, Rng& rng);

/// Returns the user's preferences for the trial: stats for the shown documents
/// plus anything else the user browsed.
using FeedbackSource = std::function<UserPreferences(const Situation&, std::span<const DocId> shown)>;

struct EngineConfig {
  BanditConfig bandit;
  ClusteringConfig clustering;
  RetrievalMode retrieval = RetrievalMode::ClusterRouted;
  bool recluster = true;
  std::size_t weight_window = 0;
  std::vector<Situation> hlcs_seed;
  std::uint64_t seed = 1;
};

/// The retrieve / recommend / feedback / improve loop. Strictly sequential;
/// every random draw comes from the engine's own seeded generator.
///
/// With ClusterRouted retrieval and reclustering this is Clustering-eps-greedy.
/// Exhaustive retrieval without reclustering gives the plain eps-greedy
/// baseline over the same case memory.
class Engine {
 public:
  Engine(const ContextModel& model, std::vector<DocId> pool, EngineConfig cfg);

  TrialRecord step(const Situation& current, const FeedbackSource& feedback);

  const CaseBase& case_base() const { return cb_; }
  CaseBase& case_base() { return cb_; }
  const EngineConfig& config() const { return cfg_; }
  std::size_t iterations() const { return tt_; }
  std::size_t reclusterings() const { return reclusterings_; }
  void set_epsilon(double epsilon);

 private:
  const ContextModel* model_;
  std::vector<DocId> pool_;
  EngineConfig cfg_;
  CaseBase cb_;
  Rng rng_;
  std::size_t tt_ = 0;
  std::size_t reclusterings_ = 0;
};

/// Selects eps from a finite candidate set by tracking clicks per candidate.
///
/// Round t (1-based) exploits the highest weight with probability
/// tau = min(1, 0.01 t) and otherwise tries a not-yet-tried candidate,
/// falling back to any candidate once all have been tried. Weights start at 1
/// and grow by the clicks observed with their candidate.
class EpsilonTuner {
 public:
  explicit EpsilonTuner(std::vector<double> candidates);

  const std::vector<double>& candidates() const { return candidates_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<bool>& tried() const { return tried_; }
  std::size_t rounds() const { return t_; }
  std::size_t argmax() const;
  double best_epsilon() const { return candidates_[argmax()]; }

  std::size_t select(Rng& rng) const;
  void record(std::size_t index, double clicks);

  struct Round {
    std::size_t index;
    double epsilon;
    double clicks;
  };
  /// select, run `episode` with the chosen eps (returns observed clicks), record.
  Round step(const std::function<double(double)>& episode, Rng& rng);

 private:
  std::vector<double> candidates_;
  std::vector<double> weights_;
  std::vector<bool> tried_;
  std::size_t t_ = 0;
};

/// {0.0, 0.1, ..., 1.0}
std::vector<double> default_epsilon_candidates();

}  // namespace ctxrec
