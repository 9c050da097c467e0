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
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctxrec/bandit.hpp"

namespace ctxrec {

/// Shape of a synthetic diary world. Defaults give 20 groups x 150 situations
/// over 10000 documents.
struct WorldConfig {
  std::size_t groups = 20;
  std::size_t situations_per_group = 150;
  std::size_t documents = 10000;

  // Every taxonomy has leaves at `taxonomy_depth` (root = 1); internal nodes
  // get a uniform branching factor in [branching_min, branching_max].
  std::size_t taxonomy_depth = 4;
  std::size_t branching_min = 5;
  std::size_t branching_max = 6;

  // Group members move each dimension of the prototype to a sibling or the
  // parent with `perturb_prob`; with `noise_prob` one dimension instead jumps
  // to an arbitrary concept of its taxonomy.
  double perturb_prob = 0.5;
  double noise_prob = 0.0;

  std::size_t hot_docs_per_group = 30;
  double hot_min = 0.5;
  double hot_max = 0.9;
  double background_min = 0.01;
  double background_max = 0.05;

  std::size_t occurrence_min = 100;  // j_max range per situation
  std::size_t occurrence_max = 200;

  // Browsing outside recommendations, per trial.
  std::size_t browse_per_trial = 3;
  double browse_hot_prob = 0.8;

  std::size_t critical_groups = 0;  // prototypes seeded as critical situations
  std::uint64_t seed = 1;

  void validate() const;
};

nlohmann::json to_json(const WorldConfig& cfg);
WorldConfig world_config_from_json(const nlohmann::json& doc, WorldConfig base = {});

struct SituationGroup {
  Situation prototype;
  std::map<DocId, double> hot;  // sparse high-affinity documents
};

struct PoolEntry {
  Situation situation;
  std::size_t group = 0;
  std::size_t occurrences = 0;  // j_max
};

/// Ground truth for replay: taxonomies, situation groups with click
/// probabilities, the document collection and the situation pool.
struct SyntheticWorld {
  WorldConfig config;
  ContextModel model;
  std::vector<SituationGroup> groups;
  std::vector<double> background;  // per document
  std::vector<DocId> documents;
  std::vector<PoolEntry> pool;
  std::vector<Situation> critical;
  std::map<Situation, std::size_t> pool_index;

  std::size_t group_of(const Situation& s) const;
  double affinity(std::size_t group, DocId doc) const;
  /// Top-N documents of a group by affinity, ties to the lowest id.
  std::vector<DocId> top_documents(std::size_t group, std::size_t n) const;
};

/// Deterministic in cfg.seed. Throws ConfigError on impossible shapes.
SyntheticWorld generate_world(const WorldConfig& cfg);

nlohmann::json to_json(const SyntheticWorld& world);
SyntheticWorld world_from_json(const nlohmann::json& doc);

/// Mean unweighted similarity over within-group and across-group pairs.
struct SeparationStats {
  double intra = 0.0;
  double inter = 0.0;
};
SeparationStats separation(const SyntheticWorld& world);

/// Bernoulli draw with the situation's group affinity for `doc`.
int sample_click(const SyntheticWorld& world, const Situation& s, DocId doc, Rng& rng);

/// Simulated user reaction to a slate: clicks, reading time and stars for
/// the shown documents, plus `browse_per_trial` documents opened directly.
UserPreferences simulate_feedback(const SyntheticWorld& world, const Situation& s, std::span<const DocId> shown,
                                  Rng& rng);

/// Anything that produces a slate per trial and learns from the feedback.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  virtual TrialRecord run_trial(const Situation& s, const FeedbackSource& feedback) = 0;
  virtual const CaseBase* case_base() const { return nullptr; }
};

class EnginePolicy final : public Policy {
 public:
  EnginePolicy(std::string name, const SyntheticWorld& world, EngineConfig cfg);
  std::string_view name() const override { return name_; }
  TrialRecord run_trial(const Situation& s, const FeedbackSource& feedback) override;
  const CaseBase* case_base() const override { return &engine_.case_base(); }
  Engine& engine() { return engine_; }

 private:
  std::string name_;
  Engine engine_;
};

class RandomPolicy final : public Policy {
 public:
  RandomPolicy(const SyntheticWorld& world, std::size_t slate_size, std::uint64_t seed);
  std::string_view name() const override { return "random"; }
  TrialRecord run_trial(const Situation& s, const FeedbackSource& feedback) override;

 private:
  const SyntheticWorld* world_;
  std::size_t slate_size_;
  Rng rng_;
};

/// Knows the ground truth and always shows the group's best documents.
class OraclePolicy final : public Policy {
 public:
  OraclePolicy(const SyntheticWorld& world, std::size_t slate_size);
  std::string_view name() const override { return "oracle"; }
  TrialRecord run_trial(const Situation& s, const FeedbackSource& feedback) override;

 private:
  const SyntheticWorld* world_;
  std::vector<std::vector<DocId>> top_;
};

inline constexpr std::array<std::string_view, 4> kPolicyNames = {"clustering-eps-greedy", "eps-greedy", "random",
                                                                 "oracle"};

/// Builds a named policy; `engine` supplies bandit and clustering settings
/// for the two engine-backed ones. Throws UnknownPolicy.
std::unique_ptr<Policy> make_policy(std::string_view name, const SyntheticWorld& world, const EngineConfig& engine);

/// Situations drawn from the pool without replacement, honoring occurrence
/// counts, plus simulated feedback, all from one seeded generator.
class ReplayStream {
 public:
  ReplayStream(const SyntheticWorld& world, std::uint64_t seed);
  ReplayStream(const ReplayStream&) = delete;
  ReplayStream& operator=(const ReplayStream&) = delete;

  /// Throws ExhaustedPool once every occurrence has been drawn.
  const PoolEntry& next();
  std::size_t remaining() const { return remaining_.size(); }
  std::size_t drawn() const { return drawn_; }
  const FeedbackSource& feedback() const { return feedback_; }

 private:
  const SyntheticWorld* world_;
  Rng rng_;
  std::vector<std::uint32_t> remaining_;
  std::size_t drawn_ = 0;
  FeedbackSource feedback_;
};

struct ReplayConfig {
  std::size_t iterations = 10000;
  std::size_t report_period = 1000;
  std::uint64_t seed = 1;
};

struct CtrSample {
  std::size_t iteration = 0;
  double avg_ctr = 0.0;
  std::uint64_t clicks = 0;
  std::uint64_t displays = 0;
  std::array<std::uint64_t, kNumBranches> branches{};
};

struct EvalReport {
  std::string policy;
  std::vector<CtrSample> series;
  std::array<std::uint64_t, kNumBranches> branch_counts{};
  std::uint64_t clicks = 0;
  std::uint64_t displays = 0;
  /// Share of threshold-passing retrievals whose case lies in the query's
  /// ground-truth group; nullopt for policies without a case memory.
  std::optional<double> retrieval_precision;
  nlohmann::json config;

  double final_avg_ctr() const { return series.empty() ? 0.0 : series.back().avg_ctr; }
};

/// Draws situations from the pool honoring occurrence counts, runs the
/// policy, samples feedback and reports cumulative clicks / displays every
/// report_period iterations. Throws ExhaustedPool, ConfigError.
EvalReport replay_evaluate(Policy& policy, const SyntheticWorld& world, const ReplayConfig& cfg,
                           std::vector<TrialRecord>* log = nullptr);

/// Expected oracle AVCTR: occurrence-weighted mean of each group's top-N affinity.
double oracle_expected_ctr(const SyntheticWorld& world, std::size_t slate_size);

/// Among pairs placed in one predicted cluster, the share with the same true
/// label. 1.0 when no pair is co-clustered. Throws LabelMismatch.
double clustering_precision(std::span<const std::size_t> predicted, std::span<const std::size_t> truth);

/// Labeled situations for clustering evaluation.
struct LabeledSample {
  std::vector<Situation> situations;
  std::vector<std::size_t> labels;
};
LabeledSample labeled_sample(const SyntheticWorld& world);

/// Diary export: situations (IDS, Time, Place, Client, Group, Occurrences) and
/// navigation rows (IdDoc, IDS, Click, Time, Interest), tab separated.
void write_diary_situations(std::ostream& out, const SyntheticWorld& world);
void write_diary_navigation(std::ostream& out, const SyntheticWorld& world, std::size_t entries_per_situation,
                            std::uint64_t seed);

/// iteration, avg_ctr, clicks, displays, then cumulative branch counts.
void write_report_tsv(std::ostream& out, const EvalReport& report);

}  // namespace ctxrec
