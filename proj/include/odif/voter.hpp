// Copyright 2026 The Odif Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ODIF_VOTER_HPP_
#define ODIF_VOTER_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "odif/dataset.hpp"
#include "odif/forest.hpp"

namespace odif {

/// Class-probability vector.
struct Posterior {
  std::vector<double> probs;

  std::size_t class_count() const { return probs.size(); }
  /// Most probable class; ties go to the lowest index.
  std::size_t argmax() const;
  /// Non-negative entries summing to one within `tolerance`.
  bool is_valid(double tolerance = 1e-9) const;

  friend bool operator==(const Posterior&, const Posterior&) = default;
};

/// Per-tree leaf -> posterior tables connecting one representer to one
/// target task. `trees` lists which of the representer's trees vote (all of
/// them unless the voter was recruited from a subset).
struct LeafVoter {
  TaskId target_task_id = 0;
  TaskId representer_task_id = 0;
  std::size_t class_count = 0;
  std::vector<std::size_t> trees;
  // tables[i] is leaf_count(trees[i]) x class_count, row-major.
  std::vector<std::vector<double>> tables;

  std::span<const double> posterior(std::size_t i, std::int32_t leaf) const {
    return {tables[i].data() + static_cast<std::size_t>(leaf) * class_count, class_count};
  }

  friend bool operator==(const LeafVoter&, const LeafVoter&) = default;
};

/// k-nearest-neighbour voter over stored leaf codes. The Euclidean distance
/// between two one-hot forest codes is sqrt(2 * #trees on which they differ).
struct KnnVoter {
  TaskId target_task_id = 0;
  TaskId representer_task_id = 0;
  std::size_t class_count = 0;
  std::size_t k = 1;
  std::vector<LeafIds> points;
  std::vector<Label> labels;

  friend bool operator==(const KnnVoter&, const KnnVoter&) = default;
};

using Voter = std::variant<LeafVoter, KnnVoter>;

/// Honest voter for the representer's own task: each tree is populated with
/// its own out-of-bag rows only. posterior_k = (c_k + a) / (c + a K); empty
/// leaves get the uniform posterior.
LeafVoter fit_in_task_voter(const ForestRepresenter& rep, const TaskDataset& data,
                            double smoothing);

/// Voter for a task other than the representer's, populated with every row
/// of `data`. `trees` restricts the voter to a subset of the representer.
LeafVoter fit_cross_task_voter(const ForestRepresenter& rep, const TaskDataset& data,
                               double smoothing,
                               std::optional<std::vector<std::size_t>> trees = std::nullopt);

/// Mean of the per-tree posteriors; `leaf_ids` has one entry per tree of
/// the representer.
Posterior vote(const LeafVoter& voter, std::span<const std::int32_t> leaf_ids);

/// Adds the voter's per-tree posteriors into `sum` and returns how many
/// trees contributed.
std::size_t accumulate_tree_votes(const LeafVoter& voter, std::span<const std::int32_t> leaf_ids,
                                  std::span<double> sum);

/// k = max(1, round(16 log2 n)) clamped to n.
std::size_t knn_default_k(std::size_t n);

/// Stores the leaf codes of every row of `data` (the representer's own task
/// included). `k` = 0 selects knn_default_k.
KnnVoter fit_knn_voter(const ForestRepresenter& rep, const TaskDataset& data, std::size_t k = 0);

/// Class frequencies among the k stored points closest to `leaf_ids`;
/// distance ties go to the lower stored index.
Posterior knn_vote(const KnnVoter& voter, std::span<const std::int32_t> leaf_ids);

Posterior vote(const Voter& voter, std::span<const std::int32_t> leaf_ids);

}  // namespace odif

#endif  // ODIF_VOTER_HPP_
