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

#ifndef ODIF_FOREST_HPP_
#define ODIF_FOREST_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "odif/dataset.hpp"
#include "odif/seed_stream.hpp"
#include "odif/tree.hpp"

namespace odif {

using LeafIds = std::vector<std::int32_t>;

/// A decision forest used as a representation: x maps to one leaf per tree
/// (a B-sparse one-hot code of length sum of leaf counts).
struct ForestRepresenter {
  TaskId source_task_id = 0;
  std::size_t feature_count = 0;
  // Rows in the training dataset; OOB indices refer into it.
  std::size_t n_train = 0;
  std::vector<DecisionTree> trees;
  std::vector<std::vector<std::size_t>> oob_indices;

  std::size_t tree_count() const { return trees.size(); }
  std::size_t representation_size() const;

  friend bool operator==(const ForestRepresenter&, const ForestRepresenter&) = default;
};

/// Grows config.n_estimators trees, each on its own subsample of `data`
/// drawn from seed.child("tree", b). The result does not depend on `threads`.
ForestRepresenter fit_representer(const TaskDataset& data, const ForestConfig& config,
                                  const SeedStream& seed, unsigned threads = 1);

/// Leaf of every tree containing x.
LeafIds transform(const ForestRepresenter& rep, std::span<const double> x);

}  // namespace odif

#endif  // ODIF_FOREST_HPP_
