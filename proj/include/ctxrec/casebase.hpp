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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctxrec/situation.hpp"

namespace ctxrec {

struct DocId {
  std::uint32_t value = 0;
  friend auto operator<=>(const DocId&, const DocId&) = default;
};

/// Interaction counters for one document within one case.
///
/// `clicks` counts every click, including ones made while browsing outside a
/// recommendation, so it may exceed `impressions`. `rec_clicks` counts only
/// clicks on recommended slates and is what CTR is computed from.
struct DocumentStats {
  DocId doc;
  std::uint64_t clicks = 0;
  std::uint64_t rec_clicks = 0;
  std::uint64_t impressions = 0;
  double reading_time = 0.0;
  int rating = 0;  // 0..5 stars

  friend bool operator==(const DocumentStats&, const DocumentStats&) = default;
};

/// Adds counters and reading time; the rating is last-write.
void merge_stats(DocumentStats& into, const DocumentStats& from);

struct UserPreferences {
  std::map<DocId, DocumentStats> docs;

  bool empty() const { return docs.empty(); }
  std::size_t size() const { return docs.size(); }
  const DocumentStats* find(DocId d) const;
  void merge(const UserPreferences& other);

  friend bool operator==(const UserPreferences&, const UserPreferences&) = default;
};

struct Case {
  Situation situation;
  UserPreferences prefs;
};

/// Case memory with its cluster partition and the critical-situation set.
///
/// Invariants: every case belongs to exactly one cluster, every cluster has a
/// medoid that is one of its members, cluster ids are 0..num_clusters()-1.
/// Cases inserted between re-clusterings join the cluster of the nearest
/// medoid under the current weights. The first insert opens cluster 0.
class CaseBase {
 public:
  explicit CaseBase(DimensionWeights weights = DimensionWeights{}) : weights_(std::move(weights)) {}

  std::size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }
  const Case& case_at(std::size_t i) const { return cases_.at(i); }
  const std::vector<Case>& cases() const { return cases_; }
  std::vector<Situation> situations() const;

  std::size_t num_clusters() const { return medoids_.size(); }
  std::size_t cluster_of(std::size_t case_index) const { return cluster_of_.at(case_index); }
  std::size_t medoid(std::size_t cluster) const { return medoids_.at(cluster); }
  const std::vector<std::size_t>& medoids() const { return medoids_; }
  const std::vector<std::size_t>& assignment() const { return cluster_of_; }
  const std::vector<std::size_t>& members(std::size_t cluster) const { return members_.at(cluster); }

  const DimensionWeights& weights() const { return weights_; }
  DimensionWeights& weights() { return weights_; }

  const std::set<Situation>& hlcs() const { return hlcs_; }
  /// Returns true when `s` was not yet a member.
  bool mark_hlcs(const Situation& s) { return hlcs_.insert(s).second; }
  bool is_hlcs(const Situation& s) const { return hlcs_.contains(s); }

  /// Appends a case and assigns it provisionally. Returns its index.
  std::size_t insert_case(Case c, const ContextModel& model);
  void update_case(std::size_t case_index, const UserPreferences& feedback);

  /// Replaces the partition. Throws ConfigError when it violates the invariants.
  void apply_partition(std::vector<std::size_t> cluster_of, std::vector<std::size_t> medoids);

  /// Throws ConfigError describing the first broken invariant.
  void check_invariants() const;

 private:
  std::vector<Case> cases_;
  std::vector<std::size_t> cluster_of_;
  std::vector<std::size_t> medoids_;
  std::vector<std::vector<std::size_t>> members_;
  std::set<Situation> hlcs_;
  DimensionWeights weights_;
};

enum class RetrievalMode {
  ClusterRouted,  // nearest medoid, then nearest case inside that cluster
  Exhaustive,     // nearest case over the whole base
};

struct Retrieval {
  std::size_t case_index = 0;
  DimSims sims{};
  double weighted = 0.0;
  double unweighted = 0.0;
};

/// Nearest past case under weighted similarity; nullopt when the base is
/// empty (cold start). Ties go to the lowest cluster id, then the lowest case
/// index.
std::optional<Retrieval> retrieve_case(const Situation& current, const CaseBase& cb, const ContextModel& model,
                                       RetrievalMode mode = RetrievalMode::ClusterRouted);

enum class UpdateKind { Updated, Inserted };

struct UpdateOutcome {
  UpdateKind kind;
  std::size_t case_index;
};

/// Merges `feedback` into the retrieved case when its situation equals
/// `current` (unweighted similarity 3), otherwise inserts a new case.
UpdateOutcome update_preferences(CaseBase& cb, const Situation& current, const std::optional<Retrieval>& retrieved,
                                 const UserPreferences& feedback, const ContextModel& model);

nlohmann::json to_json(const UserPreferences& prefs);
UserPreferences preferences_from_json(const nlohmann::json& doc);

/// Snapshot with situations spelled as concept ids.
nlohmann::json to_json(const CaseBase& cb, const ContextModel& model);
CaseBase casebase_from_json(const nlohmann::json& doc, const ContextModel& model);

}  // namespace ctxrec
