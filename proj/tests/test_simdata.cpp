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

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ctxrec/error.hpp"
#include "ctxrec/simdata.hpp"

namespace ctxrec {
namespace {

WorldConfig small_world(std::uint64_t seed = 1) {
  WorldConfig c;
  c.groups = 4;
  c.situations_per_group = 20;
  c.documents = 200;
  c.hot_docs_per_group = 12;
  c.occurrence_min = 20;
  c.occurrence_max = 40;
  c.seed = seed;
  return c;
}

double pair_count(double n) { return n * (n - 1.0) / 2.0; }

TEST(World, DefaultScale) {
  const auto w = generate_world(WorldConfig{});
  EXPECT_EQ(w.pool.size(), 3000u);
  EXPECT_EQ(w.documents.size(), 10000u);
  EXPECT_EQ(w.groups.size(), 20u);
  std::set<Situation> distinct;
  for (const auto& e : w.pool) distinct.insert(e.situation);
  EXPECT_EQ(distinct.size(), 3000u);
  for (const auto& e : w.pool) {
    EXPECT_GE(e.occurrences, 100u);
    EXPECT_LE(e.occurrences, 200u);
  }
  for (const auto& g : w.groups) {
    for (const auto& [doc, a] : g.hot) {
      EXPECT_GE(a, 0.5);
      EXPECT_LE(a, 0.9);
    }
  }
}

TEST(World, SameSeedSameExport) {
  const auto a = to_json(generate_world(small_world(7))).dump();
  const auto b = to_json(generate_world(small_world(7))).dump();
  const auto c = to_json(generate_world(small_world(8))).dump();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(World, JsonRoundTrip) {
  const auto w = generate_world(small_world(3));
  const auto back = world_from_json(to_json(w));
  EXPECT_EQ(to_json(back).dump(), to_json(w).dump());
}

TEST(World, TrivialWorldConvergesToTheDocumentsProbability) {
  WorldConfig c;
  c.groups = 1;
  c.situations_per_group = 1;
  c.documents = 1;
  c.hot_docs_per_group = 1;
  c.occurrence_min = c.occurrence_max = 4000;
  c.browse_per_trial = 0;
  const auto w = generate_world(c);
  ASSERT_EQ(w.pool.size(), 1u);
  const double p = w.affinity(0, DocId{0});
  RandomPolicy random(w, 10, 1);
  const auto report = replay_evaluate(random, w, {4000, 1000, 2});
  EXPECT_NEAR(report.final_avg_ctr(), p, 0.03);
}

TEST(World, ImpossibleShapesAreRejected) {
  WorldConfig c;
  c.taxonomy_depth = 2;
  c.branching_min = c.branching_max = 2;  // 8 leaf triples
  c.groups = 9;
  EXPECT_THROW(generate_world(c), ConfigError);
  c = {};
  c.hot_docs_per_group = c.documents + 1;
  EXPECT_THROW(generate_world(c), ConfigError);
  c = {};
  c.perturb_prob = 1.5;
  EXPECT_THROW(generate_world(c), ConfigError);
}

TEST(World, GroupsAreSeparated) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto w = generate_world(small_world(seed));
    const auto s = separation(w);
    EXPECT_GT(s.intra, s.inter) << "seed " << seed;
  }
}

TEST(SampleClick, MatchesAffinity) {
  auto w = generate_world(small_world());
  const auto& s = w.pool.front().situation;
  const auto g = w.pool.front().group;
  w.groups[g].hot[DocId{5}] = 0.3;
  w.groups[g].hot[DocId{6}] = 1.0;
  w.groups[g].hot[DocId{7}] = 0.0;
  Rng rng(11);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) sum += sample_click(w, s, DocId{5}, rng);
  EXPECT_NEAR(sum / 100000.0, 0.3, 0.01);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(sample_click(w, s, DocId{6}, rng), 1);
    ASSERT_EQ(sample_click(w, s, DocId{7}, rng), 0);
  }
  EXPECT_THROW(sample_click(w, s, DocId{999999}, rng), UnknownDoc);
}

TEST(Precision, Examples) {
  const std::vector<std::size_t> truth = {0, 0, 1, 1, 2};
  EXPECT_EQ(clustering_precision(truth, truth), 1.0);
  const std::vector<std::size_t> singletons = {0, 1, 2, 3, 4};
  EXPECT_EQ(clustering_precision(singletons, truth), 1.0);
  EXPECT_THROW(clustering_precision(singletons, std::vector<std::size_t>{0, 1}), LabelMismatch);

  std::vector<std::size_t> merged(100, 0), labels(100);
  for (std::size_t i = 0; i < 100; ++i) labels[i] = i < 50 ? 0 : 1;
  const double want = 2.0 * pair_count(50) / pair_count(100);
  EXPECT_NEAR(clustering_precision(merged, labels), want, 1e-12);
  EXPECT_NEAR(want, 0.4949, 5e-5);
}

TEST(Precision, MatchesPairEnumeration) {
  Rng rng(4);
  std::uniform_int_distribution<std::size_t> label(0, 4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> p(40), t(40);
    for (auto& x : p) x = label(rng);
    for (auto& x : t) x = label(rng);
    std::size_t same_cluster = 0, both = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = i + 1; j < p.size(); ++j) {
        if (p[i] != p[j]) continue;
        ++same_cluster;
        both += t[i] == t[j] ? 1 : 0;
      }
    }
    const double want = same_cluster == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(same_cluster);
    EXPECT_NEAR(clustering_precision(p, t), want, 1e-12);
  }
}

// Affinity-ranked top-N per group, computed straight from the ground truth.
double expected_oracle_ctr(const SyntheticWorld& w, std::size_t n) {
  double num = 0.0, den = 0.0;
  for (const auto& e : w.pool) {
    std::vector<double> a;
    for (std::size_t d = 0; d < w.background.size(); ++d) {
      auto it = w.groups[e.group].hot.find(DocId{static_cast<std::uint32_t>(d)});
      a.push_back(it == w.groups[e.group].hot.end() ? w.background[d] : it->second);
    }
    std::partial_sort(a.begin(), a.begin() + static_cast<long>(n), a.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    num += static_cast<double>(e.occurrences) * s / static_cast<double>(n);
    den += static_cast<double>(e.occurrences);
  }
  return num / den;
}

TEST(Replay, OracleMatchesClosedForm) {
  const auto w = generate_world(small_world(2));
  const double want = expected_oracle_ctr(w, 10);
  EXPECT_NEAR(oracle_expected_ctr(w, 10), want, 1e-12);
  OraclePolicy oracle(w, 10);
  const auto report = replay_evaluate(oracle, w, {2000, 500, 9});
  EXPECT_NEAR(report.final_avg_ctr(), want, 0.02);
}

TEST(Replay, ZeroAffinityWorldNeverClicks) {
  auto w = generate_world(small_world());
  for (auto& g : w.groups) {
    for (auto& [doc, a] : g.hot) a = 0.0;
  }
  std::fill(w.background.begin(), w.background.end(), 0.0);
  RandomPolicy random(w, 10, 3);
  const auto report = replay_evaluate(random, w, {1000, 100, 4});
  ASSERT_EQ(report.series.size(), 10u);
  for (const auto& s : report.series) EXPECT_EQ(s.avg_ctr, 0.0);
  EXPECT_EQ(report.clicks, 0u);
}

TEST(Replay, ReportedCtrMatchesTheTrialLog) {
  const auto w = generate_world(small_world(5));
  EngineConfig ec;
  ec.clustering.num_clusters = 4;
  ec.clustering.recluster_period = 40;
  for (const std::string name : {"clustering-eps-greedy", "eps-greedy", "random", "oracle"}) {
    auto policy = make_policy(name, w, ec);
    std::vector<TrialRecord> log;
    const auto report = replay_evaluate(*policy, w, {1500, 250, 6}, &log);
    ASSERT_EQ(log.size(), 1500u);
    std::uint64_t clicks = 0, displays = 0;
    for (std::size_t i = 0; i < log.size(); ++i) {
      clicks += log[i].total_clicks();
      displays += log[i].shown.size();
      if ((i + 1) % 250 == 0) {
        const auto& s = report.series[(i + 1) / 250 - 1];
        ASSERT_EQ(s.iteration, i + 1);
        ASSERT_EQ(s.clicks, clicks);
        ASSERT_EQ(s.displays, displays);
        ASSERT_EQ(s.avg_ctr, static_cast<double>(clicks) / static_cast<double>(displays));
      }
    }
    EXPECT_EQ(report.policy, name);
  }
}

TEST(Replay, RespectsOccurrenceCounts) {
  auto cfg = small_world(6);
  cfg.occurrence_min = 1;
  cfg.occurrence_max = 3;
  const auto w = generate_world(cfg);
  std::size_t total = 0;
  for (const auto& e : w.pool) total += e.occurrences;
  ReplayStream stream(w, 1);
  std::map<Situation, std::size_t> seen;
  for (std::size_t i = 0; i < total; ++i) ++seen[stream.next().situation];
  EXPECT_EQ(stream.remaining(), 0u);
  EXPECT_THROW(stream.next(), ExhaustedPool);
  for (const auto& e : w.pool) EXPECT_EQ(seen[e.situation], e.occurrences);

  RandomPolicy random(w, 5, 1);
  EXPECT_THROW(replay_evaluate(random, w, {total + 1, 1, 1}), ExhaustedPool);
}

TEST(Replay, SeedTripleDeterminesTheReport) {
  const auto run = [](std::uint64_t policy_seed, std::uint64_t eval_seed) {
    const auto w = generate_world(small_world(3));
    EngineConfig ec;
    ec.clustering.num_clusters = 4;
    ec.clustering.recluster_period = 50;
    ec.seed = policy_seed;
    ec.clustering.seed = policy_seed + 1;
    auto policy = make_policy("clustering-eps-greedy", w, ec);
    std::ostringstream out;
    write_report_tsv(out, replay_evaluate(*policy, w, {1000, 100, eval_seed}));
    return out.str();
  };
  EXPECT_EQ(run(1, 2), run(1, 2));
  EXPECT_NE(run(1, 2), run(1, 3));
}

TEST(Replay, RejectsBadConfig) {
  const auto w = generate_world(small_world());
  RandomPolicy random(w, 5, 1);
  EXPECT_THROW(replay_evaluate(random, w, {10, 20, 1}), ConfigError);
  EXPECT_THROW(replay_evaluate(random, w, {10, 0, 1}), ConfigError);
  EXPECT_THROW(make_policy("nope", w, EngineConfig{}), UnknownPolicy);
}

TEST(Diary, ExportHasOneRowPerSituation) {
  const auto w = generate_world(small_world());
  std::ostringstream sit, nav;
  write_diary_situations(sit, w);
  write_diary_navigation(nav, w, 3, 1);
  const auto lines = [](const std::string& s) { return std::count(s.begin(), s.end(), '\n'); };
  EXPECT_EQ(lines(sit.str()), static_cast<long>(w.pool.size()) + 1);
  EXPECT_EQ(lines(nav.str()), static_cast<long>(3 * w.pool.size()) + 1);
  EXPECT_EQ(sit.str().rfind("IDS\t", 0), 0u);
  EXPECT_EQ(nav.str().rfind("IdDoc\tIDS\tClick\tTime\tInterest\n", 0), 0u);
}

}  // namespace
}  // namespace ctxrec
