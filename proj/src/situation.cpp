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

#include "ctxrec/situation.hpp"

#include <algorithm>
#include <cmath>

#include "ctxrec/error.hpp"

namespace ctxrec {

void validate(const Situation& s, const ContextModel& model) {
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    if (!model[d].contains(s[d])) {
      throw UnknownConcept("situation: concept #" + std::to_string(s[d].value) + " not in " +
                           std::string(to_string(kDimensions[d])) + " taxonomy");
    }
  }
}

std::string describe(const Situation& s, const ContextModel& model) {
  return model[0].concept_at(s[0]).id + "|" + model[1].concept_at(s[1]).id + "|" + model[2].concept_at(s[2]).id;
}

Situation situation_from_ids(const ContextModel& model, std::string_view location, std::string_view time,
                             std::string_view social) {
  return {model[0].at(location), model[1].at(time), model[2].at(social)};
}

DimSims sim_per_dimension(const Situation& a, const Situation& b, const ContextModel& model) {
  return {model[0].similarity(a[0], b[0]), model[1].similarity(a[1], b[1]), model[2].similarity(a[2], b[2])};
}

double weighted_similarity(const Situation& a, const Situation& b, const Alpha& alpha, const ContextModel& model) {
  const auto sims = sim_per_dimension(a, b, model);
  return alpha[0] * sims[0] + alpha[1] * sims[1] + alpha[2] * sims[2];
}

double unweighted_similarity(const Situation& a, const Situation& b, const ContextModel& model) {
  const auto sims = sim_per_dimension(a, b, model);
  return sims[0] + sims[1] + sims[2];
}

bool is_exact_match(double unweighted_sim) {
  return std::abs(unweighted_sim - kExactMatchSimilarity) <= kExactMatchTolerance;
}

DimensionWeights::DimensionWeights(std::size_t window) : window_(window) {
  alpha_.fill(1.0 / 3.0);
}

void DimensionWeights::record(const DimSims& gamma) {
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    history_[d].push_back(gamma[d]);
    running_sum_[d] += gamma[d];
    if (window_ != 0 && history_[d].size() > window_) {
      running_sum_[d] -= history_[d].front();
      history_[d].pop_front();
    }
    const double mean = running_sum_[d] / static_cast<double>(history_[d].size());
    alpha_[d] = std::clamp(mean, 0.0, 1.0);
  }
}

void DimensionWeights::set_alpha(const Alpha& alpha) {
  for (double a : alpha) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("dimension weight outside [0, 1]");
  }
  alpha_ = alpha;
}

DimensionWeights record_gamma_and_update(DimensionWeights w, const DimSims& gamma) {
  w.record(gamma);
  return w;
}

}  // namespace ctxrec
