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

#include "ctxrec/casebase.hpp"

#include <algorithm>

#include "ctxrec/error.hpp"

namespace ctxrec {

using nlohmann::json;

void merge_stats(DocumentStats& into, const DocumentStats& from) {
  into.clicks += from.clicks;
  into.rec_clicks += from.rec_clicks;
  into.impressions += from.impressions;
  into.reading_time += from.reading_time;
  into.rating = from.rating;
}

const DocumentStats* UserPreferences::find(DocId d) const {
  auto it = docs.find(d);
  return it == docs.end() ? nullptr : &it->second;
}

void UserPreferences::merge(const UserPreferences& other) {
  for (const auto& [id, stats] : other.docs) {
    auto [it, inserted] = docs.try_emplace(id, stats);
    if (!inserted) merge_stats(it->second, stats);
  }
}

std::vector<Situation> CaseBase::situations() const {
  std::vector<Situation> out;
  out.reserve(cases_.size());
  for (const auto& c : cases_) out.push_back(c.situation);
  return out;
}

std::size_t CaseBase::insert_case(Case c, const ContextModel& model) {
  const auto index = cases_.size();
  std::size_t cluster = 0;
  if (medoids_.empty()) {
    medoids_.push_back(index);
    members_.emplace_back();
  } else {
    double best = -1.0;
    for (std::size_t k = 0; k < medoids_.size(); ++k) {
      const double s = weighted_similarity(c.situation, cases_[medoids_[k]].situation, weights_.alpha(), model);
      if (s > best) {
        best = s;
        cluster = k;
      }
    }
  }
  cases_.push_back(std::move(c));
  cluster_of_.push_back(cluster);
  members_[cluster].push_back(index);
  return index;
}

void CaseBase::update_case(std::size_t case_index, const UserPreferences& feedback) {
  cases_.at(case_index).prefs.merge(feedback);
}

void CaseBase::apply_partition(std::vector<std::size_t> cluster_of, std::vector<std::size_t> medoids) {
  if (cluster_of.size() != cases_.size()) throw ConfigError("partition: assignment size does not match case count");
  if (!cases_.empty() && medoids.empty()) throw ConfigError("partition: no clusters");
  std::vector<std::vector<std::size_t>> members(medoids.size());
  for (std::size_t i = 0; i < cluster_of.size(); ++i) {
    if (cluster_of[i] >= medoids.size()) throw ConfigError("partition: cluster id out of range");
    members[cluster_of[i]].push_back(i);
  }
  for (std::size_t k = 0; k < medoids.size(); ++k) {
    if (medoids[k] >= cases_.size() || cluster_of[medoids[k]] != k) {
      throw ConfigError("partition: medoid of cluster " + std::to_string(k) + " is not a member");
    }
  }
  cluster_of_ = std::move(cluster_of);
  medoids_ = std::move(medoids);
  members_ = std::move(members);
}

void CaseBase::check_invariants() const {
  if (cluster_of_.size() != cases_.size()) throw ConfigError("case base: assignment not total");
  if (!cases_.empty() && medoids_.empty()) throw ConfigError("case base: cases without clusters");
  std::size_t counted = 0;
  for (std::size_t k = 0; k < medoids_.size(); ++k) {
    if (medoids_[k] >= cases_.size() || cluster_of_[medoids_[k]] != k) {
      throw ConfigError("case base: medoid of cluster " + std::to_string(k) + " is not a member");
    }
    for (auto i : members_[k]) {
      if (cluster_of_[i] != k) throw ConfigError("case base: member list out of sync");
    }
    counted += members_[k].size();
  }
  if (counted != cases_.size()) throw ConfigError("case base: member lists out of sync");
}

std::optional<Retrieval> retrieve_case(const Situation& current, const CaseBase& cb, const ContextModel& model,
                                       RetrievalMode mode) {
  if (cb.empty()) return std::nullopt;
  const auto& alpha = cb.weights().alpha();

  std::size_t best_index = 0;
  double best = -1.0;
  auto consider = [&](std::size_t i) {
    const double s = weighted_similarity(current, cb.case_at(i).situation, alpha, model);
    if (s > best) {
      best = s;
      best_index = i;
    }
  };

  if (mode == RetrievalMode::Exhaustive) {
    for (std::size_t i = 0; i < cb.size(); ++i) consider(i);
  } else {
    std::size_t best_cluster = 0;
    double best_medoid = -1.0;
    for (std::size_t k = 0; k < cb.num_clusters(); ++k) {
      const double s = weighted_similarity(current, cb.case_at(cb.medoid(k)).situation, alpha, model);
      if (s > best_medoid) {
        best_medoid = s;
        best_cluster = k;
      }
    }
    for (auto i : cb.members(best_cluster)) consider(i);
  }

  Retrieval r;
  r.case_index = best_index;
  r.sims = sim_per_dimension(current, cb.case_at(best_index).situation, model);
  r.weighted = best;
  r.unweighted = r.sims[0] + r.sims[1] + r.sims[2];
  return r;
}

UpdateOutcome update_preferences(CaseBase& cb, const Situation& current, const std::optional<Retrieval>& retrieved,
                                 const UserPreferences& feedback, const ContextModel& model) {
  if (retrieved &&
      is_exact_match(unweighted_similarity(current, cb.case_at(retrieved->case_index).situation, model))) {
    cb.update_case(retrieved->case_index, feedback);
    return {UpdateKind::Updated, retrieved->case_index};
  }
  const auto index = cb.insert_case(Case{current, feedback}, model);
  return {UpdateKind::Inserted, index};
}

namespace {

json situation_json(const Situation& s, const ContextModel& model) {
  return {{"location", model[0].concept_at(s[0]).id},
          {"time", model[1].concept_at(s[1]).id},
          {"social", model[2].concept_at(s[2]).id}};
}

Situation situation_from(const json& j, const ContextModel& model) {
  return situation_from_ids(model, j.at("location").get<std::string>(), j.at("time").get<std::string>(),
                            j.at("social").get<std::string>());
}

}  // namespace

json to_json(const UserPreferences& prefs) {
  json arr = json::array();
  for (const auto& [id, st] : prefs.docs) {
    arr.push_back({{"doc", id.value},
                   {"clicks", st.clicks},
                   {"rec_clicks", st.rec_clicks},
                   {"impressions", st.impressions},
                   {"reading_time", st.reading_time},
                   {"rating", st.rating}});
  }
  return arr;
}

UserPreferences preferences_from_json(const json& doc) {
  UserPreferences prefs;
  for (const auto& row : doc) {
    DocumentStats st;
    st.doc = DocId{row.at("doc").get<std::uint32_t>()};
    st.clicks = row.at("clicks").get<std::uint64_t>();
    st.rec_clicks = row.value("rec_clicks", std::uint64_t{0});
    st.impressions = row.at("impressions").get<std::uint64_t>();
    st.reading_time = row.value("reading_time", 0.0);
    st.rating = row.value("rating", 0);
    if (st.rating < 0 || st.rating > 5 || st.reading_time < 0.0) {
      throw ParseError("preferences: rating or reading time out of range");
    }
    if (!prefs.docs.emplace(st.doc, st).second) throw ParseError("preferences: duplicate doc id");
  }
  return prefs;
}

json to_json(const CaseBase& cb, const ContextModel& model) {
  json weights = {{"window", cb.weights().window()}, {"alpha", cb.weights().alpha()}};
  json history = json::array();
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    const auto& h = cb.weights().history(d);
    history.push_back(std::vector<double>(h.begin(), h.end()));
  }
  weights["history"] = std::move(history);

  json cases = json::array();
  for (const auto& c : cb.cases()) {
    cases.push_back({{"situation", situation_json(c.situation, model)}, {"prefs", to_json(c.prefs)}});
  }
  json hlcs = json::array();
  for (const auto& s : cb.hlcs()) hlcs.push_back(situation_json(s, model));
  return {{"weights", std::move(weights)},
          {"cases", std::move(cases)},
          {"cluster_of", cb.assignment()},
          {"medoids", cb.medoids()},
          {"hlcs", std::move(hlcs)}};
}

CaseBase casebase_from_json(const json& doc, const ContextModel& model) {
  try {
    const auto& wj = doc.at("weights");
    DimensionWeights weights(wj.value("window", std::size_t{0}));
    const auto history = wj.at("history").get<std::vector<std::vector<double>>>();
    if (history.size() != kNumDimensions) throw ParseError("case base: weight history needs three dimensions");
    for (std::size_t i = 0; i < history[0].size(); ++i) {
      weights.record({history[0].at(i), history[1].at(i), history[2].at(i)});
    }
    if (history[0].empty()) weights.set_alpha(wj.at("alpha").get<Alpha>());

    CaseBase cb(std::move(weights));
    std::vector<std::size_t> cluster_of = doc.at("cluster_of").get<std::vector<std::size_t>>();
    std::vector<std::size_t> medoids = doc.at("medoids").get<std::vector<std::size_t>>();
    for (const auto& cj : doc.at("cases")) {
      cb.insert_case(Case{situation_from(cj.at("situation"), model), preferences_from_json(cj.at("prefs"))}, model);
    }
    if (!cb.empty()) cb.apply_partition(std::move(cluster_of), std::move(medoids));
    for (const auto& sj : doc.at("hlcs")) cb.mark_hlcs(situation_from(sj, model));
    return cb;
  } catch (const json::exception& e) {
    throw ParseError(std::string("case base: ") + e.what());
  }
}

}  // namespace ctxrec
