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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace ctxrec {

enum class Dimension : std::uint8_t { Location = 0, Time = 1, Social = 2 };

inline constexpr std::size_t kNumDimensions = 3;
inline constexpr std::array<Dimension, kNumDimensions> kDimensions = {
    Dimension::Location, Dimension::Time, Dimension::Social};

std::string_view to_string(Dimension dim);
Dimension dimension_from_string(std::string_view name);

/// Index of a concept inside the taxonomy of one dimension.
struct ConceptId {
  std::uint32_t value = 0;
  friend auto operator<=>(const ConceptId&, const ConceptId&) = default;
};

struct Concept {
  std::string id;
  std::string label;
};

/// One node as read from a document: an empty `parent` marks the root.
struct ConceptSpec {
  std::string id;
  std::string label;
  std::string parent;
};

/// Rooted concept tree for one context dimension. Immutable once built.
///
/// Depths count nodes on the root path, so the root has depth 1. For trees of
/// at most kSimilarityCacheLimit nodes the full Wu-Palmer table is built up
/// front and `similarity` becomes a lookup.
class Taxonomy {
 public:
  static constexpr std::size_t kSimilarityCacheLimit = 1024;

  /// Validates the tree: throws MultiParentError on a repeated id,
  /// MultiRootError on more than one parentless node, CycleError when a parent
  /// chain never reaches the root, ParseError on a dangling parent reference.
  Taxonomy(Dimension dimension, const std::vector<ConceptSpec>& nodes);

  Dimension dimension() const { return dimension_; }
  std::size_t size() const { return concepts_.size(); }
  ConceptId root() const { return root_; }

  const Concept& concept_at(ConceptId c) const;
  std::optional<ConceptId> find(std::string_view id) const;
  /// Like find() but throws UnknownConcept.
  ConceptId at(std::string_view id) const;
  bool contains(ConceptId c) const { return c.value < concepts_.size(); }

  std::optional<ConceptId> parent(ConceptId c) const;
  const std::vector<ConceptId>& children(ConceptId c) const;
  std::vector<ConceptId> leaves() const;
  std::size_t depth(ConceptId c) const;
  std::size_t max_depth() const { return max_depth_; }
  ConceptId lcs(ConceptId a, ConceptId b) const;

  /// Wu-Palmer similarity, served from the cache when one was built.
  double similarity(ConceptId a, ConceptId b) const;
  /// Row-major size() x size() similarity table, or nullptr when not cached.
  const double* similarity_table() const { return sim_cache_.empty() ? nullptr : sim_cache_.data(); }

  std::vector<ConceptSpec> specs() const;

 private:
  void check(ConceptId c) const;

  Dimension dimension_;
  std::vector<Concept> concepts_;
  std::vector<std::uint32_t> parent_;  // parent_[root] == root
  std::vector<std::vector<ConceptId>> children_;
  std::vector<std::uint32_t> depth_;
  std::unordered_map<std::string, ConceptId> index_;
  ConceptId root_;
  std::size_t max_depth_ = 1;
  std::vector<double> sim_cache_;
};

std::size_t depth(const Taxonomy& t, ConceptId c);
ConceptId lcs(const Taxonomy& t, ConceptId a, ConceptId b);
/// 2 * depth(lcs(a, b)) / (depth(a) + depth(b)), always computed from the tree.
double wu_palmer(const Taxonomy& t, ConceptId a, ConceptId b);

/// The three taxonomies backing situations, indexed by Dimension.
class ContextModel {
 public:
  ContextModel(Taxonomy location, Taxonomy time, Taxonomy social);

  const Taxonomy& taxonomy(Dimension dim) const {
    return taxonomies_[static_cast<std::size_t>(dim)];
  }
  const Taxonomy& operator[](std::size_t dim) const { return taxonomies_[dim]; }

 private:
  std::array<Taxonomy, kNumDimensions> taxonomies_;
};

// Taxonomy documents are JSON. Two layouts are accepted for one dimension:
//
//   nested: {"dimension": "location",
//            "root": {"id": "Any", "label": "Any", "children": [ ... ]}}
//   flat:   {"dimension": "location",
//            "nodes": [{"id": "Any"}, {"id": "France", "parent": "Any"}]}
//
// A context document holds three sections keyed "location", "time" and
// "social", each either layout without the "dimension" key. Labels default
// to the id. All errors derive from ctxrec::Error.
Taxonomy load_taxonomy(std::string_view text);
Taxonomy taxonomy_from_json(const nlohmann::json& doc, std::optional<Dimension> dimension = {});
ContextModel load_context_model(std::string_view text);
ContextModel context_model_from_json(const nlohmann::json& doc);

/// Nested layout; load_taxonomy(to_json(t).dump()) reproduces t.
nlohmann::json to_json(const Taxonomy& t);
nlohmann::json to_json(const ContextModel& model);

}  // namespace ctxrec
