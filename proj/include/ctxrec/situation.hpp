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
#include <deque>
#include <string>

#include "ctxrec/ontology.hpp"

namespace ctxrec {

/// Abstracted user context: one concept per dimension.
struct Situation {
  std::array<ConceptId, kNumDimensions> concepts{};

  Situation() = default;
  Situation(ConceptId location, ConceptId time, ConceptId social) : concepts{location, time, social} {}

  ConceptId location() const { return concepts[0]; }
  ConceptId time() const { return concepts[1]; }
  ConceptId social() const { return concepts[2]; }
  ConceptId operator[](std::size_t dim) const { return concepts[dim]; }
  ConceptId operator[](Dimension dim) const { return concepts[static_cast<std::size_t>(dim)]; }

  friend auto operator<=>(const Situation&, const Situation&) = default;
};

using DimSims = std::array<double, kNumDimensions>;
using Alpha = std::array<double, kNumDimensions>;

/// Unweighted similarity of an exact match, and the slack allowed when testing for it.
inline constexpr double kExactMatchSimilarity = 3.0;
inline constexpr double kExactMatchTolerance = 1e-9;

/// Throws UnknownConcept when a concept is missing from its taxonomy.
void validate(const Situation& s, const ContextModel& model);

/// "location-id|time-id|social-id"
std::string describe(const Situation& s, const ContextModel& model);
Situation situation_from_ids(const ContextModel& model, std::string_view location, std::string_view time,
                             std::string_view social);

DimSims sim_per_dimension(const Situation& a, const Situation& b, const ContextModel& model);
double weighted_similarity(const Situation& a, const Situation& b, const Alpha& alpha, const ContextModel& model);
double unweighted_similarity(const Situation& a, const Situation& b, const ContextModel& model);
bool is_exact_match(double unweighted_sim);

/// Per-dimension weights alpha_j, each the arithmetic mean of the similarities
/// observed on that dimension at past retrievals. Starts uniform at 1/3.
///
/// `window` = 0 keeps every observation; otherwise only the last `window`
/// observations count toward the mean.
class DimensionWeights {
 public:
  explicit DimensionWeights(std::size_t window = 0);

  const Alpha& alpha() const { return alpha_; }
  double alpha(std::size_t dim) const { return alpha_[dim]; }
  double sum() const { return alpha_[0] + alpha_[1] + alpha_[2]; }
  std::size_t window() const { return window_; }
  const std::deque<double>& history(std::size_t dim) const { return history_[dim]; }
  std::size_t observations() const { return history_[0].size(); }

  void record(const DimSims& gamma);

  /// Overrides alpha (history untouched). For experiments and snapshots.
  void set_alpha(const Alpha& alpha);

 private:
  std::size_t window_;
  Alpha alpha_;
  std::array<std::deque<double>, kNumDimensions> history_;
  std::array<double, kNumDimensions> running_sum_{};
};

DimensionWeights record_gamma_and_update(DimensionWeights w, const DimSims& gamma);

}  // namespace ctxrec
