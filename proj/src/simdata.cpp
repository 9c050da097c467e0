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

#include "ctxrec/simdata.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <set>

#include "ctxrec/error.hpp"

namespace ctxrec {

using nlohmann::json;

namespace {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t uniform_index(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

constexpr std::array<const char*, kNumDimensions> kPrefix = {"L", "T", "S"};
constexpr std::array<const char*, kNumDimensions> kRootLabel = {"AnyPlace", "AnyTime", "AnyClient"};

Taxonomy random_taxonomy(Dimension dim, const WorldConfig& cfg, Rng& rng) {
  const auto d = static_cast<std::size_t>(dim);
  std::vector<ConceptSpec> specs{{kPrefix[d], kRootLabel[d], ""}};
  std::vector<std::size_t> frontier{0};
  for (std::size_t level = 2; level <= cfg.taxonomy_depth; ++level) {
    std::vector<std::size_t> next;
    for (auto parent : frontier) {
      const auto width = std::uniform_int_distribution<std::size_t>(cfg.branching_min, cfg.branching_max)(rng);
      for (std::size_t c = 0; c < width; ++c) {
        const auto id = specs[parent].id + "." + std::to_string(c);
        next.push_back(specs.size());
        specs.push_back({id, std::string(to_string(dim)) + " " + id.substr(2), specs[parent].id});
      }
    }
    frontier = std::move(next);
  }
  return Taxonomy(dim, specs);
}

// Siblings of a leaf plus its parent.
std::vector<ConceptId> neighbourhood(const Taxonomy& t, ConceptId leaf) {
  std::vector<ConceptId> out;
  const auto parent = t.parent(leaf);
  if (!parent) return out;
  for (auto sib : t.children(*parent)) {
    if (sib != leaf) out.push_back(sib);
  }
  out.push_back(*parent);
  return out;
}

json situation_json(const Situation& s, const ContextModel& model) {
  return {{"location", model[0].concept_at(s[0]).id},
          {"time", model[1].concept_at(s[1]).id},
          {"social", model[2].concept_at(s[2]).id}};
}

Situation situation_from(const json& j, const ContextModel& model) {
  return situation_from_ids(model, j.at("location").get<std::string>(), j.at("time").get<std::string>(),
                            j.at("social").get<std::string>());
}

int stars_for(double affinity, Rng& rng) {
  const double raw = 5.0 * affinity + std::normal_distribution<double>(0.0, 0.5)(rng);
  return static_cast<int>(std::clamp(std::lround(raw), 0L, 5L));
}

double reading_minutes(double affinity, Rng& rng) { return uniform(rng, 0.5, 1.5) * (1.0 + 4.0 * affinity); }

}  // namespace

void WorldConfig::validate() const {
  if (groups < 1) throw ConfigError("world: need at least one group");
  if (situations_per_group < 1) throw ConfigError("world: need at least one situation per group");
  if (documents < 1) throw ConfigError("world: need at least one document");
  if (taxonomy_depth < 1) throw ConfigError("world: taxonomy depth must be >= 1");
  if (branching_min < 1 || branching_max < branching_min) throw ConfigError("world: bad branching range");
  auto prob = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string("world: ") + what + " must lie in [0, 1]");
  };
  prob(perturb_prob, "perturb_prob");
  prob(noise_prob, "noise_prob");
  prob(hot_min, "hot_min");
  prob(hot_max, "hot_max");
  prob(background_min, "background_min");
  prob(background_max, "background_max");
  prob(browse_hot_prob, "browse_hot_prob");
  if (hot_max < hot_min || background_max < background_min) throw ConfigError("world: inverted affinity range");
  if (hot_docs_per_group > documents) throw ConfigError("world: more hot documents than documents");
  if (occurrence_min < 1 || occurrence_max < occurrence_min) throw ConfigError("world: bad occurrence range");
  if (critical_groups > groups) throw ConfigError("world: more critical groups than groups");
}

json to_json(const WorldConfig& c) {
  return {{"groups", c.groups},
          {"situations_per_group", c.situations_per_group},
          {"documents", c.documents},
          {"taxonomy_depth", c.taxonomy_depth},
          {"branching_min", c.branching_min},
          {"branching_max", c.branching_max},
          {"perturb_prob", c.perturb_prob},
          {"noise_prob", c.noise_prob},
          {"hot_docs_per_group", c.hot_docs_per_group},
          {"hot_min", c.hot_min},
          {"hot_max", c.hot_max},
          {"background_min", c.background_min},
          {"background_max", c.background_max},
          {"occurrence_min", c.occurrence_min},
          {"occurrence_max", c.occurrence_max},
          {"browse_per_trial", c.browse_per_trial},
          {"browse_hot_prob", c.browse_hot_prob},
          {"critical_groups", c.critical_groups},
          {"seed", c.seed}};
}

WorldConfig world_config_from_json(const json& doc, WorldConfig c) {
  if (!doc.is_object()) throw ConfigError("world config must be an object");
  static const std::set<std::string> known = {
      "groups",         "situations_per_group", "documents",        "taxonomy_depth", "branching_min",
      "branching_max",  "perturb_prob",         "noise_prob",       "hot_docs_per_group",
      "hot_min",        "hot_max",              "background_min",   "background_max", "occurrence_min",
      "occurrence_max", "browse_per_trial",     "browse_hot_prob",  "critical_groups", "seed"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw ConfigError("world config: unknown key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("groups", c.groups);
    get("situations_per_group", c.situations_per_group);
    get("documents", c.documents);
    get("taxonomy_depth", c.taxonomy_depth);
    get("branching_min", c.branching_min);
    get("branching_max", c.branching_max);
    get("perturb_prob", c.perturb_prob);
    get("noise_prob", c.noise_prob);
    get("hot_docs_per_group", c.hot_docs_per_group);
    get("hot_min", c.hot_min);
    get("hot_max", c.hot_max);
    get("background_min", c.background_min);
    get("background_max", c.background_max);
    get("occurrence_min", c.occurrence_min);
    get("occurrence_max", c.occurrence_max);
    get("browse_per_trial", c.browse_per_trial);
    get("browse_hot_prob", c.browse_hot_prob);
    get("critical_groups", c.critical_groups);
    get("seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("world config: ") + e.what());
  }
  return c;
}

std::size_t SyntheticWorld::group_of(const Situation& s) const {
  auto it = pool_index.find(s);
  if (it == pool_index.end()) throw ConfigError("situation is not part of the world");
  return pool[it->second].group;
}

double SyntheticWorld::affinity(std::size_t group, DocId doc) const {
  if (doc.value >= background.size()) throw UnknownDoc("document " + std::to_string(doc.value) + " not in world");
  const auto& hot = groups.at(group).hot;
  auto it = hot.find(doc);
  return it == hot.end() ? background[doc.value] : it->second;
}

std::vector<DocId> SyntheticWorld::top_documents(std::size_t group, std::size_t n) const {
  std::vector<DocId> order(documents);
  std::stable_sort(order.begin(), order.end(),
                   [&](DocId a, DocId b) { return affinity(group, a) > affinity(group, b); });
  order.resize(std::min(n, order.size()));
  return order;
}

SyntheticWorld generate_world(const WorldConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  auto loc = random_taxonomy(Dimension::Location, cfg, rng);
  auto tim = random_taxonomy(Dimension::Time, cfg, rng);
  auto soc = random_taxonomy(Dimension::Social, cfg, rng);
  SyntheticWorld w{cfg, ContextModel(std::move(loc), std::move(tim), std::move(soc)), {}, {}, {}, {}, {}, {}};
  const auto& model = w.model;

  std::array<std::vector<ConceptId>, kNumDimensions> leaves;
  double triples = 1.0;
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    leaves[d] = model[d].leaves();
    triples *= static_cast<double>(leaves[d].size());
  }
  if (triples < static_cast<double>(cfg.groups)) {
    throw ConfigError("world: " + std::to_string(cfg.groups) + " prototypes requested but only " +
                      std::to_string(static_cast<long long>(triples)) + " leaf triples exist");
  }

  // Prototypes differ from each other in the parent of at least one
  // dimension, so their sibling/parent neighbourhoods never overlap.
  const std::size_t max_attempts = 20000 + 200 * cfg.groups;
  std::size_t attempts = 0;
  std::set<Situation> used;
  while (w.groups.size() < cfg.groups) {
    if (++attempts > max_attempts) throw ConfigError("world: cannot place that many separated group prototypes");
    Situation proto(leaves[0][uniform_index(rng, leaves[0].size())], leaves[1][uniform_index(rng, leaves[1].size())],
                    leaves[2][uniform_index(rng, leaves[2].size())]);
    double variants = 1.0;
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      variants *= static_cast<double>(neighbourhood(model[d], proto[d]).size() + 1);
    }
    if (variants < static_cast<double>(cfg.situations_per_group)) continue;
    const bool separated = std::all_of(w.groups.begin(), w.groups.end(), [&](const SituationGroup& g) {
      for (std::size_t d = 0; d < kNumDimensions; ++d) {
        if (model[d].parent(proto[d]) != model[d].parent(g.prototype[d])) return true;
      }
      return false;
    });
    if (!separated || used.contains(proto)) continue;
    used.insert(proto);
    w.groups.push_back({proto, {}});
  }

  for (std::size_t g = 0; g < cfg.groups; ++g) {
    const auto proto = w.groups[g].prototype;
    std::array<std::vector<ConceptId>, kNumDimensions> nb;
    for (std::size_t d = 0; d < kNumDimensions; ++d) nb[d] = neighbourhood(model[d], proto[d]);

    std::vector<Situation> members{proto};
    std::size_t tries = 0;
    const std::size_t max_tries = 2000 * cfg.situations_per_group + 10000;
    while (members.size() < cfg.situations_per_group) {
      if (++tries > max_tries) throw ConfigError("world: cannot draw enough distinct situations per group");
      Situation s = proto;
      if (cfg.noise_prob > 0.0 && uniform(rng, 0.0, 1.0) < cfg.noise_prob) {
        const auto d = uniform_index(rng, kNumDimensions);
        s.concepts[d] = ConceptId{static_cast<std::uint32_t>(uniform_index(rng, model[d].size()))};
      } else {
        for (std::size_t d = 0; d < kNumDimensions; ++d) {
          if (!nb[d].empty() && uniform(rng, 0.0, 1.0) < cfg.perturb_prob) {
            s.concepts[d] = nb[d][uniform_index(rng, nb[d].size())];
          }
        }
      }
      if (used.insert(s).second) members.push_back(s);
    }
    for (const auto& s : members) {
      const auto occ = std::uniform_int_distribution<std::size_t>(cfg.occurrence_min, cfg.occurrence_max)(rng);
      w.pool_index.emplace(s, w.pool.size());
      w.pool.push_back({s, g, occ});
    }
  }

  w.documents.resize(cfg.documents);
  w.background.resize(cfg.documents);
  for (std::uint32_t i = 0; i < cfg.documents; ++i) {
    w.documents[i] = DocId{i};
    w.background[i] = uniform(rng, cfg.background_min, cfg.background_max);
  }
  for (auto& group : w.groups) {
    std::vector<std::uint32_t> ids(cfg.documents);
    std::iota(ids.begin(), ids.end(), 0u);
    for (std::size_t i = 0; i < cfg.hot_docs_per_group; ++i) {
      std::swap(ids[i], ids[i + uniform_index(rng, cfg.documents - i)]);
      group.hot.emplace(DocId{ids[i]}, uniform(rng, cfg.hot_min, cfg.hot_max));
    }
  }
  for (std::size_t g = 0; g < cfg.critical_groups; ++g) w.critical.push_back(w.groups[g].prototype);

  if (cfg.groups > 1 && cfg.situations_per_group > 1) {
    const auto sep = separation(w);
    if (!(sep.intra > sep.inter)) throw ConfigError("world: groups are not separated (intra <= inter similarity)");
  }
  return w;
}

SeparationStats separation(const SyntheticWorld& world) {
  double intra = 0.0, inter = 0.0;
  std::size_t n_intra = 0, n_inter = 0;
  const auto& pool = world.pool;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      const double s = unweighted_similarity(pool[i].situation, pool[j].situation, world.model);
      if (pool[i].group == pool[j].group) {
        intra += s;
        ++n_intra;
      } else {
        inter += s;
        ++n_inter;
      }
    }
  }
  return {n_intra ? intra / static_cast<double>(n_intra) : 0.0, n_inter ? inter / static_cast<double>(n_inter) : 0.0};
}

json to_json(const SyntheticWorld& w) {
  json groups = json::array();
  for (const auto& g : w.groups) {
    json hot = json::array();
    for (const auto& [doc, a] : g.hot) hot.push_back({doc.value, a});
    groups.push_back({{"prototype", situation_json(g.prototype, w.model)}, {"hot", std::move(hot)}});
  }
  json pool = json::array();
  for (const auto& e : w.pool) {
    pool.push_back({{"situation", situation_json(e.situation, w.model)},
                    {"group", e.group},
                    {"occurrences", e.occurrences}});
  }
  json critical = json::array();
  for (const auto& s : w.critical) critical.push_back(situation_json(s, w.model));
  return {{"config", to_json(w.config)}, {"taxonomies", to_json(w.model)}, {"groups", std::move(groups)},
          {"background", w.background},  {"pool", std::move(pool)},        {"critical", std::move(critical)}};
}

SyntheticWorld world_from_json(const json& doc) {
  try {
    auto cfg = world_config_from_json(doc.at("config"));
    SyntheticWorld w{cfg, context_model_from_json(doc.at("taxonomies")), {}, {}, {}, {}, {}, {}};
    for (const auto& gj : doc.at("groups")) {
      SituationGroup g{situation_from(gj.at("prototype"), w.model), {}};
      for (const auto& h : gj.at("hot")) g.hot.emplace(DocId{h.at(0).get<std::uint32_t>()}, h.at(1).get<double>());
      w.groups.push_back(std::move(g));
    }
    w.background = doc.at("background").get<std::vector<double>>();
    for (std::uint32_t i = 0; i < w.background.size(); ++i) w.documents.push_back(DocId{i});
    for (const auto& pj : doc.at("pool")) {
      PoolEntry e{situation_from(pj.at("situation"), w.model), pj.at("group").get<std::size_t>(),
                  pj.at("occurrences").get<std::size_t>()};
      if (e.group >= w.groups.size()) throw ConfigError("world: pool entry references unknown group");
      if (!w.pool_index.emplace(e.situation, w.pool.size()).second) throw ConfigError("world: duplicate situation");
      w.pool.push_back(e);
    }
    for (const auto& sj : doc.at("critical")) w.critical.push_back(situation_from(sj, w.model));
    for (const auto& g : w.groups) {
      for (const auto& [d, a] : g.hot) {
        if (d.value >= w.background.size()) throw ConfigError("world: hot document out of range");
      }
    }
    return w;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("world: ") + e.what());
  }
}

int sample_click(const SyntheticWorld& world, const Situation& s, DocId doc, Rng& rng) {
  const double a = world.affinity(world.group_of(s), doc);
  return uniform(rng, 0.0, 1.0) < a ? 1 : 0;
}

namespace {

struct BrowseEvent {
  DocId doc;
  double reading_time = 0.0;
  int rating = 0;
};

// A document opened outside any recommendation, mostly from the group's hot set.
BrowseEvent browse_once(const SyntheticWorld& world, std::size_t group, Rng& rng) {
  const auto& hot = world.groups[group].hot;
  BrowseEvent e;
  if (!hot.empty() && uniform(rng, 0.0, 1.0) < world.config.browse_hot_prob) {
    e.doc = std::next(hot.begin(), static_cast<std::ptrdiff_t>(uniform_index(rng, hot.size())))->first;
  } else {
    e.doc = world.documents[uniform_index(rng, world.documents.size())];
  }
  const double a = world.affinity(group, e.doc);
  e.reading_time = reading_minutes(a, rng);
  e.rating = stars_for(a, rng);
  return e;
}

}  // namespace

UserPreferences simulate_feedback(const SyntheticWorld& world, const Situation& s, std::span<const DocId> shown,
                                  Rng& rng) {
  const auto group = world.group_of(s);
  UserPreferences fb;
  for (auto doc : shown) {
    const double a = world.affinity(group, doc);
    DocumentStats st{doc};
    st.impressions = 1;
    if (uniform(rng, 0.0, 1.0) < a) {
      st.clicks = 1;
      st.rec_clicks = 1;
      st.reading_time = reading_minutes(a, rng);
      st.rating = stars_for(a, rng);
    }
    fb.docs[doc] = st;
  }
  for (std::size_t i = 0; i < world.config.browse_per_trial; ++i) {
    const auto b = browse_once(world, group, rng);
    auto [it, inserted] = fb.docs.try_emplace(b.doc, DocumentStats{b.doc});
    it->second.clicks += 1;
    it->second.reading_time += b.reading_time;
    it->second.rating = b.rating;
  }
  return fb;
}

EnginePolicy::EnginePolicy(std::string name, const SyntheticWorld& world, EngineConfig cfg)
    : name_(std::move(name)), engine_(world.model, world.documents, std::move(cfg)) {}

TrialRecord EnginePolicy::run_trial(const Situation& s, const FeedbackSource& feedback) {
  return engine_.step(s, feedback);
}

RandomPolicy::RandomPolicy(const SyntheticWorld& world, std::size_t slate_size, std::uint64_t seed)
    : world_(&world), slate_size_(slate_size), rng_(seed) {}

TrialRecord RandomPolicy::run_trial(const Situation& s, const FeedbackSource& feedback) {
  TrialRecord rec;
  rec.situation = s;
  rec.branch = Branch::ColdStart;
  rec.shown = random_slate(world_->documents, slate_size_, rng_);
  const auto fb = feedback(s, rec.shown);
  for (auto d : rec.shown) {
    if (const auto* st = fb.find(d); st && st->rec_clicks > 0) rec.clicks[d] = st->rec_clicks;
  }
  return rec;
}

OraclePolicy::OraclePolicy(const SyntheticWorld& world, std::size_t slate_size) : world_(&world) {
  for (std::size_t g = 0; g < world.groups.size(); ++g) top_.push_back(world.top_documents(g, slate_size));
}

TrialRecord OraclePolicy::run_trial(const Situation& s, const FeedbackSource& feedback) {
  TrialRecord rec;
  rec.situation = s;
  rec.branch = Branch::HlcsGreedy;
  rec.shown = top_[world_->group_of(s)];
  const auto fb = feedback(s, rec.shown);
  for (auto d : rec.shown) {
    if (const auto* st = fb.find(d); st && st->rec_clicks > 0) rec.clicks[d] = st->rec_clicks;
  }
  return rec;
}

std::unique_ptr<Policy> make_policy(std::string_view name, const SyntheticWorld& world, const EngineConfig& engine) {
  if (name == "clustering-eps-greedy") {
    auto cfg = engine;
    cfg.retrieval = RetrievalMode::ClusterRouted;
    cfg.recluster = true;
    cfg.hlcs_seed = world.critical;
    return std::make_unique<EnginePolicy>(std::string(name), world, std::move(cfg));
  }
  if (name == "eps-greedy") {
    auto cfg = engine;
    cfg.retrieval = RetrievalMode::Exhaustive;
    cfg.recluster = false;
    cfg.hlcs_seed = world.critical;
    return std::make_unique<EnginePolicy>(std::string(name), world, std::move(cfg));
  }
  if (name == "random") return std::make_unique<RandomPolicy>(world, engine.bandit.slate_size, engine.seed);
  if (name == "oracle") return std::make_unique<OraclePolicy>(world, engine.bandit.slate_size);
  throw UnknownPolicy("unknown policy '" + std::string(name) + "'");
}

ReplayStream::ReplayStream(const SyntheticWorld& world, std::uint64_t seed) : world_(&world), rng_(seed) {
  for (std::uint32_t i = 0; i < world.pool.size(); ++i) {
    remaining_.insert(remaining_.end(), world.pool[i].occurrences, i);
  }
  feedback_ = [this](const Situation& s, std::span<const DocId> shown) {
    return simulate_feedback(*world_, s, shown, rng_);
  };
}

const PoolEntry& ReplayStream::next() {
  if (remaining_.empty()) {
    throw ExhaustedPool("replay: situation pool exhausted after " + std::to_string(drawn_) + " draws");
  }
  const auto slot = uniform_index(rng_, remaining_.size());
  const auto& entry = world_->pool[remaining_[slot]];
  remaining_[slot] = remaining_.back();
  remaining_.pop_back();
  ++drawn_;
  return entry;
}

EvalReport replay_evaluate(Policy& policy, const SyntheticWorld& world, const ReplayConfig& cfg,
                           std::vector<TrialRecord>* log) {
  if (cfg.report_period < 1 || cfg.iterations < cfg.report_period) {
    throw ConfigError("replay: need iterations >= report_period >= 1");
  }
  ReplayStream stream(world, cfg.seed);
  EvalReport rep;
  rep.policy = std::string(policy.name());
  std::uint64_t matched = 0, correct = 0;
  for (std::size_t i = 1; i <= cfg.iterations; ++i) {
    const auto& entry = stream.next();
    auto rec = policy.run_trial(entry.situation, stream.feedback());
    rep.clicks += rec.total_clicks();
    rep.displays += rec.shown.size();
    ++rep.branch_counts[static_cast<std::size_t>(rec.branch)];
    if (const auto* cb = policy.case_base();
        cb && rec.retrieved && (rec.branch == Branch::EpsGreedy || rec.branch == Branch::HlcsGreedy)) {
      ++matched;
      if (world.group_of(cb->case_at(*rec.retrieved).situation) == entry.group) ++correct;
    }
    if (i % cfg.report_period == 0) {
      CtrSample sample;
      sample.iteration = i;
      sample.clicks = rep.clicks;
      sample.displays = rep.displays;
      sample.avg_ctr = rep.displays ? static_cast<double>(rep.clicks) / static_cast<double>(rep.displays) : 0.0;
      sample.branches = rep.branch_counts;
      rep.series.push_back(sample);
    }
    if (log) log->push_back(std::move(rec));
  }
  if (policy.case_base()) {
    rep.retrieval_precision = matched ? static_cast<double>(correct) / static_cast<double>(matched) : 1.0;
  }
  rep.config = {{"policy", rep.policy},
                {"iterations", cfg.iterations},
                {"report_period", cfg.report_period},
                {"eval_seed", cfg.seed},
                {"world_seed", world.config.seed}};
  return rep;
}

double oracle_expected_ctr(const SyntheticWorld& world, std::size_t slate_size) {
  double num = 0.0, den = 0.0;
  std::vector<double> group_mean(world.groups.size());
  for (std::size_t g = 0; g < world.groups.size(); ++g) {
    const auto top = world.top_documents(g, slate_size);
    double s = 0.0;
    for (auto d : top) s += world.affinity(g, d);
    group_mean[g] = s / static_cast<double>(top.size());
  }
  for (const auto& e : world.pool) {
    num += static_cast<double>(e.occurrences) * group_mean[e.group];
    den += static_cast<double>(e.occurrences);
  }
  return den > 0.0 ? num / den : 0.0;
}

double clustering_precision(std::span<const std::size_t> predicted, std::span<const std::size_t> truth) {
  if (predicted.size() != truth.size()) throw LabelMismatch("precision: partition and labels differ in size");
  // Count co-clustered pairs per predicted cluster, and same-label pairs per
  // (cluster, label) cell.
  std::map<std::size_t, std::uint64_t> cluster_size;
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> cell;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    ++cluster_size[predicted[i]];
    ++cell[{predicted[i], truth[i]}];
  }
  auto pairs = [](std::uint64_t n) { return n * (n - 1) / 2; };
  std::uint64_t together = 0, agree = 0;
  for (const auto& [c, n] : cluster_size) together += pairs(n);
  for (const auto& [key, n] : cell) agree += pairs(n);
  return together == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(together);
}

LabeledSample labeled_sample(const SyntheticWorld& world) {
  LabeledSample out;
  for (const auto& e : world.pool) {
    out.situations.push_back(e.situation);
    out.labels.push_back(e.group);
  }
  return out;
}

void write_diary_situations(std::ostream& out, const SyntheticWorld& w) {
  out << "IDS\tTime\tPlace\tClient\tGroup\tOccurrences\n";
  for (std::size_t i = 0; i < w.pool.size(); ++i) {
    const auto& e = w.pool[i];
    out << (i + 1) << '\t' << w.model[1].concept_at(e.situation.time()).id << '\t'
        << w.model[0].concept_at(e.situation.location()).id << '\t' << w.model[2].concept_at(e.situation.social()).id
        << '\t' << e.group << '\t' << e.occurrences << '\n';
  }
}

void write_diary_navigation(std::ostream& out, const SyntheticWorld& w, std::size_t entries_per_situation,
                            std::uint64_t seed) {
  Rng rng(seed);
  out << "IdDoc\tIDS\tClick\tTime\tInterest\n";
  out << std::fixed << std::setprecision(2);
  for (std::size_t i = 0; i < w.pool.size(); ++i) {
    for (std::size_t k = 0; k < entries_per_situation; ++k) {
      const auto e = browse_once(w, w.pool[i].group, rng);
      out << e.doc.value << '\t' << (i + 1) << "\t1\t" << e.reading_time << '\t' << e.rating << '\n';
    }
  }
}

void write_report_tsv(std::ostream& out, const EvalReport& rep) {
  out << "iteration\tavg_ctr\tclicks\tdisplays";
  for (std::size_t b = 0; b < kNumBranches; ++b) out << '\t' << to_string(static_cast<Branch>(b));
  out << '\n';
  out << std::fixed << std::setprecision(6);
  for (const auto& s : rep.series) {
    out << s.iteration << '\t' << s.avg_ctr << '\t' << s.clicks << '\t' << s.displays;
    for (auto n : s.branches) out << '\t' << n;
    out << '\n';
  }
}

}  // namespace ctxrec
