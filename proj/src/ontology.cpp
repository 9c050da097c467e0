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

#include "ctxrec/ontology.hpp"

#include <algorithm>
#include <deque>

#include "ctxrec/error.hpp"

namespace ctxrec {

namespace {

constexpr std::uint32_t kNoParent = UINT32_MAX;

using nlohmann::json;

std::string string_field(const json& node, const char* key, const std::string& fallback) {
  auto it = node.find(key);
  if (it == node.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw ParseError(std::string("taxonomy: field '") + key + "' must be a string");
  return it->get<std::string>();
}

void flatten_nested(const json& node, const std::string& parent, std::vector<ConceptSpec>& out,
                    std::size_t level) {
  if (!node.is_object()) throw ParseError("taxonomy: tree node must be an object");
  if (level > 100000) throw ParseError("taxonomy: tree too deep");
  std::string id = string_field(node, "id", "");
  if (id.empty()) throw ParseError("taxonomy: node without id");
  out.push_back({id, string_field(node, "label", id), parent});
  if (auto it = node.find("children"); it != node.end()) {
    if (!it->is_array()) throw ParseError("taxonomy: 'children' must be an array");
    for (const auto& child : *it) flatten_nested(child, id, out, level + 1);
  }
}

json nested_node(const Taxonomy& t, ConceptId c) {
  const auto& concept_ref = t.concept_at(c);
  json node = {{"id", concept_ref.id}, {"label", concept_ref.label}};
  const auto& kids = t.children(c);
  if (!kids.empty()) {
    json arr = json::array();
    for (auto k : kids) arr.push_back(nested_node(t, k));
    node["children"] = std::move(arr);
  }
  return node;
}

}  // namespace

std::string_view to_string(Dimension dim) {
  switch (dim) {
    case Dimension::Location:
      return "location";
    case Dimension::Time:
      return "time";
    case Dimension::Social:
      return "social";
  }
  return "unknown";
}

Dimension dimension_from_string(std::string_view name) {
  if (name == "location") return Dimension::Location;
  if (name == "time") return Dimension::Time;
  if (name == "social") return Dimension::Social;
  throw ParseError("unknown dimension '" + std::string(name) + "'");
}

Taxonomy::Taxonomy(Dimension dimension, const std::vector<ConceptSpec>& nodes) : dimension_(dimension) {
  if (nodes.empty()) throw ParseError("taxonomy: no nodes");
  const auto n = nodes.size();
  concepts_.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& spec = nodes[i];
    if (spec.id.empty()) throw ParseError("taxonomy: empty concept id");
    if (!index_.emplace(spec.id, ConceptId{i}).second) {
      throw MultiParentError("taxonomy: concept '" + spec.id + "' appears more than once");
    }
    concepts_.push_back({spec.id, spec.label.empty() ? spec.id : spec.label});
  }

  parent_.assign(n, kNoParent);
  std::vector<std::uint32_t> roots;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (nodes[i].parent.empty()) {
      roots.push_back(i);
      continue;
    }
    auto it = index_.find(nodes[i].parent);
    if (it == index_.end()) {
      throw ParseError("taxonomy: concept '" + nodes[i].id + "' has unknown parent '" + nodes[i].parent + "'");
    }
    parent_[i] = it->second.value;
  }
  if (roots.empty()) throw CycleError("taxonomy: no root, parent links form a cycle");
  if (roots.size() > 1) {
    throw MultiRootError("taxonomy: " + std::to_string(roots.size()) + " roots ('" + nodes[roots[0]].id +
                         "', '" + nodes[roots[1]].id + "', ...)");
  }
  root_ = ConceptId{roots.front()};
  parent_[root_.value] = root_.value;

  children_.assign(n, {});
  for (std::uint32_t i = 0; i < n; ++i) {
    if (i != root_.value) children_[parent_[i]].push_back(ConceptId{i});
  }

  // Breadth-first from the root; anything unreached sits on a parent loop.
  depth_.assign(n, 0);
  depth_[root_.value] = 1;
  std::deque<std::uint32_t> queue{root_.value};
  std::size_t reached = 0;
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    ++reached;
    max_depth_ = std::max<std::size_t>(max_depth_, depth_[cur]);
    for (auto child : children_[cur]) {
      depth_[child.value] = depth_[cur] + 1;
      queue.push_back(child.value);
    }
  }
  if (reached != n) {
    for (std::uint32_t i = 0; i < n; ++i) {
      if (depth_[i] == 0) throw CycleError("taxonomy: concept '" + concepts_[i].id + "' is on a parent loop");
    }
  }

  if (n <= kSimilarityCacheLimit) {
    sim_cache_.resize(n * n);
    for (std::uint32_t a = 0; a < n; ++a) {
      sim_cache_[a * n + a] = 1.0;
      for (std::uint32_t b = a + 1; b < n; ++b) {
        const double s = wu_palmer(*this, ConceptId{a}, ConceptId{b});
        sim_cache_[a * n + b] = s;
        sim_cache_[b * n + a] = s;
      }
    }
  }
}

void Taxonomy::check(ConceptId c) const {
  if (!contains(c)) {
    throw UnknownConcept("concept #" + std::to_string(c.value) + " not in " + std::string(to_string(dimension_)) +
                         " taxonomy");
  }
}

const Concept& Taxonomy::concept_at(ConceptId c) const {
  check(c);
  return concepts_[c.value];
}

std::optional<ConceptId> Taxonomy::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ConceptId Taxonomy::at(std::string_view id) const {
  if (auto c = find(id)) return *c;
  throw UnknownConcept("concept '" + std::string(id) + "' not in " + std::string(to_string(dimension_)) +
                       " taxonomy");
}

std::optional<ConceptId> Taxonomy::parent(ConceptId c) const {
  check(c);
  if (c == root_) return std::nullopt;
  return ConceptId{parent_[c.value]};
}

const std::vector<ConceptId>& Taxonomy::children(ConceptId c) const {
  check(c);
  return children_[c.value];
}

std::vector<ConceptId> Taxonomy::leaves() const {
  std::vector<ConceptId> out;
  for (std::uint32_t i = 0; i < concepts_.size(); ++i) {
    if (children_[i].empty()) out.push_back(ConceptId{i});
  }
  return out;
}

std::size_t Taxonomy::depth(ConceptId c) const {
  check(c);
  return depth_[c.value];
}

ConceptId Taxonomy::lcs(ConceptId a, ConceptId b) const {
  check(a);
  check(b);
  auto x = a.value;
  auto y = b.value;
  while (depth_[x] > depth_[y]) x = parent_[x];
  while (depth_[y] > depth_[x]) y = parent_[y];
  while (x != y) {
    x = parent_[x];
    y = parent_[y];
  }
  return ConceptId{x};
}

double Taxonomy::similarity(ConceptId a, ConceptId b) const {
  if (!sim_cache_.empty()) {
    check(a);
    check(b);
    return sim_cache_[a.value * concepts_.size() + b.value];
  }
  return wu_palmer(*this, a, b);
}

std::vector<ConceptSpec> Taxonomy::specs() const {
  std::vector<ConceptSpec> out;
  out.reserve(concepts_.size());
  for (std::uint32_t i = 0; i < concepts_.size(); ++i) {
    out.push_back({concepts_[i].id, concepts_[i].label, i == root_.value ? "" : concepts_[parent_[i]].id});
  }
  return out;
}

std::size_t depth(const Taxonomy& t, ConceptId c) { return t.depth(c); }

ConceptId lcs(const Taxonomy& t, ConceptId a, ConceptId b) { return t.lcs(a, b); }

double wu_palmer(const Taxonomy& t, ConceptId a, ConceptId b) {
  const auto common = t.depth(t.lcs(a, b));
  return 2.0 * static_cast<double>(common) / static_cast<double>(t.depth(a) + t.depth(b));
}

ContextModel::ContextModel(Taxonomy location, Taxonomy time, Taxonomy social)
    : taxonomies_{std::move(location), std::move(time), std::move(social)} {
  for (auto dim : kDimensions) {
    if (taxonomy(dim).dimension() != dim) {
      throw ParseError("context model: expected " + std::string(to_string(dim)) + " taxonomy, got " +
                       std::string(to_string(taxonomy(dim).dimension())));
    }
  }
}

Taxonomy taxonomy_from_json(const json& doc, std::optional<Dimension> dimension) {
  if (!doc.is_object()) throw ParseError("taxonomy: document must be an object");
  if (!dimension) {
    auto it = doc.find("dimension");
    if (it == doc.end() || !it->is_string()) throw ParseError("taxonomy: missing 'dimension'");
    dimension = dimension_from_string(it->get<std::string>());
  }
  std::vector<ConceptSpec> specs;
  const bool has_root = doc.contains("root");
  const bool has_nodes = doc.contains("nodes");
  if (has_root == has_nodes) throw ParseError("taxonomy: expected exactly one of 'root' or 'nodes'");
  if (has_root) {
    const auto& root = doc.at("root");
    if (root.is_string()) {
      specs.push_back({root.get<std::string>(), root.get<std::string>(), ""});
    } else {
      flatten_nested(root, "", specs, 0);
    }
  } else {
    const auto& nodes = doc.at("nodes");
    if (!nodes.is_array()) throw ParseError("taxonomy: 'nodes' must be an array");
    for (const auto& node : nodes) {
      if (!node.is_object()) throw ParseError("taxonomy: node must be an object");
      std::string id = string_field(node, "id", "");
      if (id.empty()) throw ParseError("taxonomy: node without id");
      std::string label = string_field(node, "label", id);
      specs.push_back({id, label, string_field(node, "parent", "")});
    }
  }
  return Taxonomy(*dimension, specs);
}

Taxonomy load_taxonomy(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("taxonomy: ") + e.what());
  }
  return taxonomy_from_json(doc);
}

ContextModel context_model_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("context model: document must be an object");
  auto section = [&](Dimension dim) {
    auto key = std::string(to_string(dim));
    if (!doc.contains(key)) throw ParseError("context model: missing section '" + key + "'");
    return taxonomy_from_json(doc.at(key), dim);
  };
  return ContextModel(section(Dimension::Location), section(Dimension::Time), section(Dimension::Social));
}

ContextModel load_context_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("context model: ") + e.what());
  }
  return context_model_from_json(doc);
}

json to_json(const Taxonomy& t) {
  return {{"dimension", std::string(to_string(t.dimension()))}, {"root", nested_node(t, t.root())}};
}

json to_json(const ContextModel& model) {
  json doc = json::object();
  for (auto dim : kDimensions) {
    auto section = to_json(model.taxonomy(dim));
    section.erase("dimension");
    doc[std::string(to_string(dim))] = std::move(section);
  }
  return doc;
}

}  // namespace ctxrec
