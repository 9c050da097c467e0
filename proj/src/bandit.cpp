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

#include "ctxrec/bandit.hpp"

#include <algorithm>

#include "ctxrec/error.hpp"

namespace ctxrec {

namespace {

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t uniform_index(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

// Candidates in exploitation order: CTR descending, doc id ascending.
std::vector<DocId> ranked(const UserPreferences& candidates) {
  std::vector<std::pair<double, DocId>> scored;
  scored.reserve(candidates.size());
  for (const auto& [id, st] : candidates.docs) scored.emplace_back(get_ctr(st), id);
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<DocId> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(s.second);
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void BanditConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("bandit: epsilon must lie in [0, 1]");
  if (slate_size < 1) throw ConfigError("bandit: slate size N must be >= 1");
  if (!(threshold >= 0.0 && threshold <= 3.0)) throw ConfigError("bandit: threshold B must lie in [0, 3]");
}

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::HlcsGreedy:
      return "hlcs_greedy";
    case Branch::EpsGreedy:
      return "eps_greedy";
    case Branch::ColdStart:
      return "cold_start";
    case Branch::NoRecommend:
      return "no_recommend";
  }
  return "unknown";
}

std::uint64_t TrialRecord::total_clicks() const {
  std::uint64_t total = 0;
  for (const auto& [doc, n] : clicks) total += n;
  return total;
}

double get_ctr(const DocumentStats& ds) {
  if (ds.impressions == 0) return 0.0;
  const auto clicks = std::min(ds.rec_clicks, ds.impressions);
  return static_cast<double>(clicks) / static_cast<double>(ds.impressions);
}

Selection epsilon_greedy(const UserPreferences& candidates, std::size_t slate_size, double epsilon, Rng& rng) {
  if (candidates.empty()) throw EmptyCandidates("epsilon_greedy: no candidate documents");
  auto remaining = ranked(candidates);
  const auto n = std::min(slate_size, remaining.size());
  Selection sel;
  sel.docs.reserve(n);
  sel.exploratory.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = uniform01(rng);
    std::size_t pick = 0;
    const bool explore = !(q > epsilon);
    if (explore) pick = uniform_index(rng, remaining.size());
    sel.docs.push_back(remaining[pick]);
    sel.exploratory.push_back(explore);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return sel;
}

std::vector<DocId> greedy_top_n(const UserPreferences& candidates, std::size_t slate_size) {
  auto order = ranked(candidates);
  if (order.size() > slate_size) order.resize(slate_size);
  return order;
}

std::vector<DocId> random_slate(std::span<const DocId> pool, std::size_t slate_size, Rng& rng) {
  if (slate_size >= pool.size()) {
    std::vector<DocId> all(pool.begin(), pool.end());
    for (std::size_t i = all.size(); i > 1; --i) std::swap(all[i - 1], all[uniform_index(rng, i)]);
    return all;
  }
  // Rejection sampling; slates are tiny compared to the pool.
  std::vector<std::size_t> picked;
  picked.reserve(slate_size);
  while (picked.size() < slate_size) {
    const auto idx = uniform_index(rng, pool.size());
    if (std::find(picked.begin(), picked.end(), idx) == picked.end()) picked.push_back(idx);
  }
  std::vector<DocId> out;
  out.reserve(slate_size);
  for (auto idx : picked) out.push_back(pool[idx]);
  return out;
}

Recommendation recommend_documents(CaseBase& cb, const Situation& current, const std::optional<Retrieval>& retrieved,
                                   const BanditConfig& cfg, std::span<const DocId> pool, Rng& rng) {
  const bool usable = retrieved && retrieved->unweighted >= cfg.threshold &&
                      !cb.case_at(retrieved->case_index).prefs.empty();
  if (!usable) {
    if (!cfg.cold_start_fallback || pool.empty()) return {{}, Branch::NoRecommend};
    return {random_slate(pool, cfg.slate_size, rng), Branch::ColdStart};
  }
  const auto& past = cb.case_at(retrieved->case_index);
  if (cb.is_hlcs(past.situation)) {
    auto docs = greedy_top_n(past.prefs, cfg.slate_size);
    cb.mark_hlcs(current);
    return {std::move(docs), Branch::HlcsGreedy};
  }
  return {epsilon_greedy(past.prefs, cfg.slate_size, cfg.epsilon, rng).docs, Branch::EpsGreedy};
}

Engine::Engine(const ContextModel& model, std::vector<DocId> pool, EngineConfig cfg)
    : model_(&model),
      pool_(std::move(pool)),
      cfg_(std::move(cfg)),
      cb_(DimensionWeights(cfg_.weight_window)),
      rng_(cfg_.seed) {
  cfg_.bandit.validate();
  cfg_.clustering.validate();
  for (const auto& s : cfg_.hlcs_seed) {
    validate(s, model);
    cb_.mark_hlcs(s);
  }
}

void Engine::set_epsilon(double epsilon) {
  auto next = cfg_.bandit;
  next.epsilon = epsilon;
  next.validate();
  cfg_.bandit = next;
}

TrialRecord Engine::step(const Situation& current, const FeedbackSource& feedback) {
  validate(current, *model_);
  TrialRecord rec;
  rec.situation = current;

  const auto retrieved = retrieve_case(current, cb_, *model_, cfg_.retrieval);
  if (retrieved) {
    rec.retrieved = retrieved->case_index;
    rec.similarity = retrieved->unweighted;
  }

  auto reco = recommend_documents(cb_, current, retrieved, cfg_.bandit, pool_, rng_);
  rec.shown = std::move(reco.docs);
  rec.branch = reco.branch;

  UserPreferences fb = feedback(current, rec.shown);
  for (auto d : rec.shown) {
    auto [it, inserted] = fb.docs.try_emplace(d, DocumentStats{d});
    if (it->second.impressions == 0) it->second.impressions = 1;
    if (it->second.rec_clicks > 0) rec.clicks[d] = it->second.rec_clicks;
  }
  // Clicks outside the slate are browsing, never recommendation clicks.
  for (auto& [d, st] : fb.docs) {
    if (std::find(rec.shown.begin(), rec.shown.end(), d) == rec.shown.end()) {
      st.rec_clicks = 0;
      st.impressions = 0;
    }
  }

  rec.update = update_preferences(cb_, current, retrieved, fb, *model_).kind;
  if (retrieved) cb_.weights().record(retrieved->sims);

  ++tt_;
  if (cfg_.recluster && should_recluster(tt_, cfg_.clustering.recluster_period) &&
      cb_.size() >= cfg_.clustering.num_clusters) {
    auto ccfg = cfg_.clustering;
    ccfg.seed = mix_seed(cfg_.clustering.seed, reclusterings_);
    cluster_situations(cb_, *model_, ccfg);
    ++reclusterings_;
    rec.reclustered = true;
  }
  return rec;
}

EpsilonTuner::EpsilonTuner(std::vector<double> candidates) : candidates_(std::move(candidates)) {
  if (candidates_.empty()) throw ConfigError("tuner: candidate set is empty");
  for (double e : candidates_) {
    if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("tuner: candidate epsilon outside [0, 1]");
  }
  weights_.assign(candidates_.size(), 1.0);
  tried_.assign(candidates_.size(), false);
}

std::size_t EpsilonTuner::argmax() const {
  return static_cast<std::size_t>(std::max_element(weights_.begin(), weights_.end()) - weights_.begin());
}

std::size_t EpsilonTuner::select(Rng& rng) const {
  const double tau = std::min(1.0, 0.01 * static_cast<double>(t_ + 1));
  const double q = uniform01(rng);
  if (q <= tau) return argmax();
  std::vector<std::size_t> untried;
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    if (!tried_[i]) untried.push_back(i);
  }
  if (untried.empty()) return uniform_index(rng, candidates_.size());
  return untried[uniform_index(rng, untried.size())];
}

void EpsilonTuner::record(std::size_t index, double clicks) {
  if (index >= candidates_.size()) throw ConfigError("tuner: candidate index out of range");
  if (clicks < 0.0) throw ConfigError("tuner: negative click count");
  weights_[index] += clicks;
  tried_[index] = true;
  ++t_;
}

EpsilonTuner::Round EpsilonTuner::step(const std::function<double(double)>& episode, Rng& rng) {
  const auto index = select(rng);
  const double clicks = episode(candidates_[index]);
  record(index, clicks);
  return {index, candidates_[index], clicks};
}

std::vector<double> default_epsilon_candidates() {
  std::vector<double> out;
  for (int i = 0; i <= 10; ++i) out.push_back(i / 10.0);
  return out;
}

}  // namespace ctxrec
