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

#include "ctxrec/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "ctxrec/error.hpp"

namespace ctxrec {

namespace {

// Distinct concepts on one dimension with their multiplicities, keyed by
// concept id. score[c] = sum over distinct v of count[v] * sim(c, v).
struct ConceptHistogram {
  std::vector<ConceptId> values;
  std::vector<double> count;
  std::vector<double> score;
};

// Templated over an accessor so clusters can be scored without copying
// their situations out of a larger array.
template <typename MemberAt>
std::size_t best_medoid(std::size_t count, MemberAt&& member_at, const Alpha& alpha, const ContextModel& model) {
  std::array<ConceptHistogram, kNumDimensions> hist;
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    const auto& tax = model[d];
    auto& h = hist[d];
    h.count.assign(tax.size(), 0.0);
    h.score.assign(tax.size(), 0.0);
    for (std::size_t i = 0; i < count; ++i) {
      const auto c = member_at(i)[d];
      if (h.count[c.value] == 0.0) h.values.push_back(c);
      h.count[c.value] += 1.0;
    }
    std::sort(h.values.begin(), h.values.end());
    const double* table = tax.similarity_table();
    const std::size_t stride = tax.size();
    for (const auto v : h.values) {
      double s = 0.0;
      if (table != nullptr) {
        const double* row = table + v.value * stride;
        for (const auto c : h.values) s += h.count[c.value] * row[c.value];
      } else {
        for (const auto c : h.values) s += h.count[c.value] * tax.similarity(v, c);
      }
      h.score[v.value] = s;
    }
  }

  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    const auto& s = member_at(i);
    double score = 0.0;
    for (std::size_t d = 0; d < kNumDimensions; ++d) score += alpha[d] * hist[d].score[s[d].value];
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

std::vector<std::size_t> draw_distinct(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

void ClusteringConfig::validate() const {
  if (num_clusters < 1) throw ConfigError("clustering: Nc must be >= 1");
  if (max_iterations < 1) throw ConfigError("clustering: t_max must be >= 1");
  if (recluster_period < 1) throw ConfigError("clustering: ct must be >= 1");
  if (restarts < 1) throw ConfigError("clustering: restarts must be >= 1");
}

double clustering_objective(std::span<const Situation> situations, const Partition& partition, const Alpha& alpha,
                            const ContextModel& model) {
  double total = 0.0;
  for (std::size_t i = 0; i < situations.size(); ++i) {
    total += weighted_similarity(situations[i], situations[partition.medoids[partition.assignment[i]]], alpha, model);
  }
  return total;
}

std::size_t recompute_medoid(std::span<const Situation> members, const Alpha& alpha, const ContextModel& model) {
  if (members.empty()) throw EmptyCluster("recompute_medoid: cluster has no members");
  for (const auto& s : members) validate(s, model);
  return best_medoid(
      members.size(), [&](std::size_t i) -> const Situation& { return members[i]; }, alpha, model);
}

namespace {

// Weighted similarity over pre-validated situations, reading the cached
// tables directly when every taxonomy has one.
class Kernel {
 public:
  Kernel(const Alpha& alpha, const ContextModel& model) : alpha_(alpha), model_(model) {
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      table_[d] = model[d].similarity_table();
      stride_[d] = model[d].size();
      fast_ = fast_ && table_[d] != nullptr;
    }
  }

  double operator()(const Situation& a, const Situation& b) const {
    if (!fast_) return weighted_similarity(a, b, alpha_, model_);
    double s = 0.0;
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      s += alpha_[d] * table_[d][a[d].value * stride_[d] + b[d].value];
    }
    return s;
  }

 private:
  Alpha alpha_;
  const ContextModel& model_;
  std::array<const double*, kNumDimensions> table_{};
  std::array<std::size_t, kNumDimensions> stride_{};
  bool fast_ = true;
};

double objective_of(std::span<const Situation> situations, const Partition& p, const Kernel& sim) {
  double total = 0.0;
  for (std::size_t i = 0; i < situations.size(); ++i) total += sim(situations[i], situations[p.medoids[p.assignment[i]]]);
  return total;
}

Partition kmedoids_once(std::span<const Situation> situations, const Alpha& alpha, const ContextModel& model,
                        const ClusteringConfig& cfg, std::uint64_t seed) {
  const auto n = situations.size();
  const auto k = cfg.num_clusters;
  Partition p;
  p.medoids = draw_distinct(n, k, seed);
  p.assignment.assign(n, 0);
  std::vector<double> fit(n, 0.0);  // similarity of each situation to its medoid
  std::vector<std::size_t> previous;
  std::vector<std::vector<std::size_t>> members(k);
  const Kernel sim(alpha, model);

  for (std::size_t round = 1; round <= cfg.max_iterations; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_sim = -1.0;
      for (std::size_t c = 0; c < k; ++c) {
        const double s = sim(situations[i], situations[p.medoids[c]]);
        if (s > best_sim) {
          best_sim = s;
          best = c;
        }
      }
      p.assignment[i] = best;
      fit[i] = best_sim;
    }

    // Repair: only reachable with duplicate situations, where a medoid can
    // be captured by an identical medoid with a lower cluster id.
    for (auto& m : members) m.clear();
    for (std::size_t i = 0; i < n; ++i) members[p.assignment[i]].push_back(i);
    for (std::size_t c = 0; c < k; ++c) {
      if (!members[c].empty()) continue;
      std::size_t worst = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (members[p.assignment[i]].size() < 2) continue;
        if (worst == n || fit[i] < fit[worst]) worst = i;
      }
      if (worst == n) throw EmptyCluster("clustering: cannot repair empty cluster");
      auto& old = members[p.assignment[worst]];
      old.erase(std::find(old.begin(), old.end(), worst));
      p.assignment[worst] = c;
      p.medoids[c] = worst;
      fit[worst] = sim(situations[worst], situations[worst]);
      members[c].push_back(worst);
    }
    // A medoid moved into a repaired cluster leaves its old cluster headless.
    for (std::size_t c = 0; c < k; ++c) {
      if (p.assignment[p.medoids[c]] != c) p.medoids[c] = members[c].front();
    }

    p.iterations = round;
    p.objective_trace.push_back(objective_of(situations, p, sim));
    if (!previous.empty() && previous == p.assignment) {
      p.converged = true;
      break;
    }
    previous = p.assignment;

    for (std::size_t c = 0; c < k; ++c) {
      const auto& m = members[c];
      const auto best = best_medoid(
          m.size(), [&](std::size_t i) -> const Situation& { return situations[m[i]]; }, alpha, model);
      p.medoids[c] = m[best];
    }
    p.objective_trace.push_back(objective_of(situations, p, sim));
  }
  p.objective = p.objective_trace.back();
  return p;
}

}  // namespace

Partition kmedoids(std::span<const Situation> situations, const Alpha& alpha, const ContextModel& model,
                   const ClusteringConfig& cfg) {
  cfg.validate();
  const auto n = situations.size();
  if (n < cfg.num_clusters) {
    throw TooFewCases("clustering: " + std::to_string(n) + " situations for " + std::to_string(cfg.num_clusters) +
                      " clusters");
  }
  for (const auto& s : situations) validate(s, model);
  std::mt19937_64 seeds(cfg.seed);
  Partition best;
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    auto p = kmedoids_once(situations, alpha, model, cfg, seeds());
    p.restart = r;
    if (r == 0 || p.objective > best.objective) best = std::move(p);
  }
  return best;
}

Partition cluster_situations(CaseBase& cb, const ContextModel& model, const ClusteringConfig& cfg) {
  const auto situations = cb.situations();
  auto p = kmedoids(situations, cb.weights().alpha(), model, cfg);
  cb.apply_partition(p.assignment, p.medoids);
  return p;
}

bool should_recluster(std::size_t tt, std::size_t period) { return period > 0 && tt > 0 && tt % period == 0; }

}  // namespace ctxrec
