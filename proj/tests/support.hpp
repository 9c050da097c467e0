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

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ctxrec/ontology.hpp"
#include "ctxrec/situation.hpp"

namespace ctxrec::testing {

// (id, parent) pairs; an empty parent marks the root.
inline Taxonomy make_tree(Dimension dim, const std::vector<std::pair<std::string, std::string>>& nodes) {
  std::vector<ConceptSpec> specs;
  for (const auto& [id, parent] : nodes) specs.push_back({id, id, parent});
  return Taxonomy(dim, specs);
}

// Random tree on n nodes named "n0".."n{n-1}": node i > 0 hangs below a
// uniformly chosen earlier node. parents[i] is the parent index, -1 for the root.
struct RandomTree {
  std::vector<int> parents;
  std::vector<ConceptSpec> specs;
};

inline RandomTree random_tree(std::size_t n, std::mt19937_64& rng) {
  RandomTree t;
  t.parents.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    std::string parent;
    if (i > 0) {
      t.parents[i] = static_cast<int>(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng));
      parent = "n" + std::to_string(t.parents[i]);
    }
    t.specs.push_back({"n" + std::to_string(i), "", parent});
  }
  // Shuffle the listing order so ids and positions decouple.
  std::shuffle(t.specs.begin(), t.specs.end(), rng);
  return t;
}

// Path oracle: both root paths listed explicitly, the deepest shared node is
// the subsumer.
inline double path_oracle_similarity(const std::vector<int>& parents, int a, int b) {
  auto path = [&](int x) {
    std::vector<int> p;
    for (; x != -1; x = parents[x]) p.insert(p.begin(), x);
    return p;
  };
  const auto pa = path(a), pb = path(b);
  std::size_t common = 0;
  while (common < pa.size() && common < pb.size() && pa[common] == pb[common]) ++common;
  return 2.0 * static_cast<double>(common) / static_cast<double>(pa.size() + pb.size());
}

// Any -> {A -> {A1, A2, A3}, B -> {B1, B2, B3}} on every dimension.
inline ContextModel two_branch_model() {
  auto tree = [](Dimension d) {
    return make_tree(d, {{"Any", ""}, {"A", "Any"}, {"B", "Any"}, {"A1", "A"}, {"A2", "A"}, {"A3", "A"},
                         {"B1", "B"}, {"B2", "B"}, {"B3", "B"}});
  };
  return ContextModel(tree(Dimension::Location), tree(Dimension::Time), tree(Dimension::Social));
}

inline Situation sit(const ContextModel& m, const std::string& l, const std::string& t, const std::string& s) {
  return situation_from_ids(m, l, t, s);
}

}  // namespace ctxrec::testing
