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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctxrec/casebase.hpp"

namespace ctxrec {

struct ClusteringConfig {
  std::size_t num_clusters = 10;      // Nc
  std::size_t max_iterations = 60;    // t_max
  std::size_t recluster_period = 40;  // ct
  /// Independent random initializations; the run with the highest final
  /// objective is kept.
  std::size_t restarts = 10;
  std::uint64_t seed = 1;

  /// Throws ConfigError unless Nc, t_max, ct and restarts are all >= 1.
  void validate() const;
};

struct Partition {
  std::vector<std::size_t> assignment;  // situation index -> cluster id
  std::vector<std::size_t> medoids;     // cluster id -> situation index
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t restart = 0;  // which initialization won
  double objective = 0.0;
  /// Objective after every assignment step and every medoid step, in order.
  std::vector<double> objective_trace;
};

/// Sum over situations of weighted similarity to their cluster's medoid.
double clustering_objective(std::span<const Situation> situations, const Partition& partition, const Alpha& alpha,
                            const ContextModel& model);

/// Member maximizing mean weighted similarity to all members (itself
/// included); ties go to the lowest index. Throws EmptyCluster.
std::size_t recompute_medoid(std::span<const Situation> members, const Alpha& alpha, const ContextModel& model);

/// k-medoid alternation over situations with a similarity objective.
///
/// Nc distinct situations are drawn with the seeded generator as initial
/// medoids. Each of at most t_max rounds assigns every situation to the
/// cluster whose medoid is most similar (ties to the lowest cluster id) and
/// then recomputes every medoid. A round whose assignment equals the previous
/// one ends the run. A cluster left empty is reseeded with the situation
/// least similar to its own medoid. Throws TooFewCases when there are fewer
/// situations than clusters.
Partition kmedoids(std::span<const Situation> situations, const Alpha& alpha, const ContextModel& model,
                   const ClusteringConfig& cfg);

/// Clusters the case base situations with its current weights and installs
/// the resulting partition.
Partition cluster_situations(CaseBase& cb, const ContextModel& model, const ClusteringConfig& cfg);

/// True every `period` engine iterations: tt > 0 and tt % period == 0.
bool should_recluster(std::size_t tt, std::size_t period);

}  // namespace ctxrec
