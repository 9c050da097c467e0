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

#include <random>

#include "ctxrec/error.hpp"
#include "ctxrec/ontology.hpp"
#include "support.hpp"

namespace ctxrec {
namespace {

using testing::make_tree;

Taxonomy chain() { return make_tree(Dimension::Location, {{"Any", ""}, {"France", "Any"}, {"Paris", "France"}}); }

Taxonomy france() {
  return make_tree(Dimension::Location, {{"Any", ""}, {"France", "Any"}, {"Paris", "France"}, {"Roubaix", "France"}});
}

TEST(Taxonomy, SingleNodeHasDepthOne) {
  auto t = load_taxonomy(R"({"dimension": "location", "root": "Any"})");
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(depth(t, t.root()), 1u);
  EXPECT_EQ(t.concept_at(t.root()).id, "Any");
}

TEST(Taxonomy, ChainDepths) {
  auto t = chain();
  EXPECT_EQ(depth(t, t.root()), 1u);
  EXPECT_EQ(depth(t, t.at("France")), 2u);
  EXPECT_EQ(depth(t, t.at("Paris")), 3u);
  EXPECT_EQ(t.max_depth(), 3u);
}

TEST(Taxonomy, UnknownConceptThrows) {
  auto t = chain();
  EXPECT_THROW(t.at("Lyon"), UnknownConcept);
  EXPECT_THROW(depth(t, ConceptId{17}), UnknownConcept);
  EXPECT_THROW(wu_palmer(t, ConceptId{0}, ConceptId{3}), UnknownConcept);
}

TEST(Taxonomy, LcsExamples) {
  auto t = france();
  const auto paris = t.at("Paris"), roubaix = t.at("Roubaix");
  EXPECT_EQ(lcs(t, paris, paris), paris);
  EXPECT_EQ(lcs(t, t.root(), roubaix), t.root());
  EXPECT_EQ(lcs(t, paris, roubaix), t.at("France"));
}

TEST(Taxonomy, WuPalmerExamples) {
  auto c = make_tree(Dimension::Time, {{"Any", ""}, {"A", "Any"}, {"B", "A"}});
  EXPECT_DOUBLE_EQ(wu_palmer(c, c.at("A"), c.at("B")), 0.8);
  EXPECT_DOUBLE_EQ(wu_palmer(c, c.at("B"), c.at("B")), 1.0);
  auto s = make_tree(Dimension::Social, {{"Any", ""}, {"X", "Any"}, {"Y", "Any"}});
  EXPECT_DOUBLE_EQ(wu_palmer(s, s.at("X"), s.at("Y")), 0.5);
  EXPECT_DOUBLE_EQ(s.similarity(s.at("X"), s.at("Y")), 0.5);
}

TEST(Taxonomy, RejectsTwoParents) {
  // The same id listed twice under different parents.
  EXPECT_THROW(make_tree(Dimension::Location,
                         {{"Any", ""}, {"France", "Any"}, {"Nord", "Any"}, {"Paris", "France"}, {"Paris", "Nord"}}),
               MultiParentError);
  EXPECT_THROW(load_taxonomy(R"({"dimension": "location", "nodes": [
      {"id": "Any"}, {"id": "France", "parent": "Any"}, {"id": "Paris", "parent": "France"},
      {"id": "Paris", "parent": "Any"}]})"),
               Error);
}

TEST(Taxonomy, RejectsSecondRoot) {
  EXPECT_THROW(make_tree(Dimension::Location, {{"Any", ""}, {"Other", ""}}), MultiRootError);
}

TEST(Taxonomy, RejectsCycle) {
  EXPECT_THROW(make_tree(Dimension::Location, {{"Any", ""}, {"A", "B"}, {"B", "A"}}), CycleError);
  EXPECT_THROW(make_tree(Dimension::Location, {{"A", "B"}, {"B", "A"}}), CycleError);
}

TEST(Taxonomy, RejectsMalformedDocuments) {
  EXPECT_THROW(load_taxonomy("{not json"), ParseError);
  EXPECT_THROW(load_taxonomy(R"({"dimension": "location"})"), ParseError);
  EXPECT_THROW(load_taxonomy(R"({"dimension": "mood", "root": "Any"})"), ParseError);
  EXPECT_THROW(make_tree(Dimension::Location, {{"Any", ""}, {"A", "Missing"}}), ParseError);
  EXPECT_THROW(Taxonomy(Dimension::Location, {}), ParseError);
}

TEST(Taxonomy, NestedAndFlatLayoutsAgree) {
  auto nested = load_taxonomy(R"({"dimension": "time", "root": {"id": "Any", "children": [
      {"id": "Weekday", "label": "Work days", "children": [{"id": "Monday"}]}, {"id": "Weekend"}]}})");
  auto flat = load_taxonomy(R"({"dimension": "time", "nodes": [
      {"id": "Any"}, {"id": "Weekday", "label": "Work days", "parent": "Any"},
      {"id": "Monday", "parent": "Weekday"}, {"id": "Weekend", "parent": "Any"}]})");
  EXPECT_EQ(nested.dimension(), Dimension::Time);
  EXPECT_EQ(nested.size(), flat.size());
  EXPECT_EQ(nested.concept_at(nested.at("Weekday")).label, "Work days");
  EXPECT_EQ(nested.concept_at(nested.at("Monday")).label, "Monday");
  for (const auto* a : {"Any", "Weekday", "Monday", "Weekend"}) {
    for (const auto* b : {"Any", "Weekday", "Monday", "Weekend"}) {
      EXPECT_DOUBLE_EQ(nested.similarity(nested.at(a), nested.at(b)), flat.similarity(flat.at(a), flat.at(b)));
    }
  }
}

TEST(Taxonomy, JsonRoundTrip) {
  auto t = france();
  auto back = load_taxonomy(to_json(t).dump());
  ASSERT_EQ(back.size(), t.size());
  for (const auto& spec : t.specs()) {
    EXPECT_EQ(depth(back, back.at(spec.id)), depth(t, t.at(spec.id)));
    if (auto p = back.parent(back.at(spec.id))) {
      EXPECT_EQ(back.concept_at(*p).id, spec.parent);
    }
  }
}

TEST(ContextModel, LoadsThreeSections) {
  auto m = load_context_model(R"({
      "location": {"root": {"id": "Anywhere", "children": [{"id": "Home"}, {"id": "Office"}]}},
      "time": {"nodes": [{"id": "Anytime"}, {"id": "Morning", "parent": "Anytime"}]},
      "social": {"root": "Anyone"}})");
  EXPECT_EQ(m.taxonomy(Dimension::Location).size(), 3u);
  EXPECT_EQ(m.taxonomy(Dimension::Time).size(), 2u);
  EXPECT_EQ(m.taxonomy(Dimension::Social).size(), 1u);
  EXPECT_EQ(m[1].dimension(), Dimension::Time);
  auto again = context_model_from_json(to_json(m));
  EXPECT_EQ(again[0].size(), 3u);
  EXPECT_THROW(load_context_model(R"({"location": {"root": "A"}, "time": {"root": "B"}})"), ParseError);
}

TEST(ContextModel, RejectsMisplacedDimension) {
  auto a = make_tree(Dimension::Location, {{"Any", ""}});
  auto b = make_tree(Dimension::Location, {{"Any", ""}});
  auto c = make_tree(Dimension::Social, {{"Any", ""}});
  EXPECT_THROW(ContextModel(a, b, c), Error);
}

// Properties over random trees.

TEST(WuPalmerProperties, MatchesPathOracleOnRandomTrees) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
    auto rt = testing::random_tree(n, rng);
    Taxonomy t(Dimension::Location, rt.specs);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const auto ca = t.at("n" + std::to_string(a)), cb = t.at("n" + std::to_string(b));
        const double want = testing::path_oracle_similarity(rt.parents, static_cast<int>(a), static_cast<int>(b));
        EXPECT_NEAR(wu_palmer(t, ca, cb), want, 1e-12);
        EXPECT_NEAR(t.similarity(ca, cb), want, 1e-12);
      }
    }
  }
}

TEST(WuPalmerProperties, SymmetricBoundedAndIdentity) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto rt = testing::random_tree(std::uniform_int_distribution<std::size_t>(1, 30)(rng), rng);
    Taxonomy t(Dimension::Time, rt.specs);
    for (std::uint32_t a = 0; a < t.size(); ++a) {
      for (std::uint32_t b = 0; b < t.size(); ++b) {
        const double s = t.similarity(ConceptId{a}, ConceptId{b});
        EXPECT_EQ(s, t.similarity(ConceptId{b}, ConceptId{a}));
        EXPECT_GT(s, 0.0);
        EXPECT_LE(s, 1.0);
        EXPECT_EQ(s == 1.0, a == b);
      }
    }
  }
}

TEST(WuPalmerProperties, MovingAwayFromSubsumerLowersSimilarity) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    auto rt = testing::random_tree(30, rng);
    Taxonomy t(Dimension::Social, rt.specs);
    for (std::uint32_t a = 0; a < t.size(); ++a) {
      for (std::uint32_t b = 0; b < t.size(); ++b) {
        const ConceptId ca{a}, cb{b};
        const auto l = lcs(t, ca, cb);
        for (auto child : t.children(cb)) {
          // Going one level deeper below b keeps the same subsumer unless b
          // is an ancestor of a.
          if (lcs(t, ca, child) != l) continue;
          EXPECT_LT(wu_palmer(t, ca, child), wu_palmer(t, ca, cb));
        }
      }
    }
  }
}

TEST(Dimension, NamesRoundTrip) {
  for (auto d : kDimensions) EXPECT_EQ(dimension_from_string(to_string(d)), d);
  EXPECT_THROW(dimension_from_string("weather"), ParseError);
}

}  // namespace
}  // namespace ctxrec
