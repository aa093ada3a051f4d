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

#ifndef ODIF_TREE_HPP_
#define ODIF_TREE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "odif/dataset.hpp"
#include "odif/seed_stream.hpp"

namespace odif {

enum class SplitCriterion { kGini, kEntropy };

struct ForestConfig {
  std::size_t n_estimators = 10;
  std::size_t max_depth = 30;
  double max_samples = 0.67;
  std::size_t min_samples_leaf = 1;
  SplitCriterion criterion = SplitCriterion::kGini;
  // Features considered per node; 0 means all of them.
  std::size_t max_features = 0;
  // Draw the per-tree sample with replacement instead of subsampling.
  bool bootstrap = false;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;

  friend bool operator==(const ForestConfig&, const ForestConfig&) = default;
};

/// Flat node record. `feature < 0` marks a leaf.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t leaf_id = -1;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Axis-aligned binary tree. Inputs with x[feature] < threshold go left.
/// Leaves are numbered 0..leaf_count()-1 in depth-first (left first) order.
class DecisionTree {
 public:
  DecisionTree() = default;
  /// Adopts a node array; node 0 is the root. Throws DataError if malformed.
  explicit DecisionTree(std::vector<TreeNode> nodes);

  std::int32_t leaf_of(std::span<const double> x) const;

  std::size_t leaf_count() const { return leaf_count_; }
  std::size_t depth() const { return depth_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t leaf_count_ = 0;
  std::size_t depth_ = 0;
};

struct Split {
  std::size_t feature;
  double threshold;
  double impurity_decrease;
};

double node_impurity(std::span<const std::size_t> class_counts, std::size_t total,
                     SplitCriterion criterion);

/// Best axis-aligned split among all features of `data` over `rows`.
/// Candidates are midpoints between adjacent distinct values; ties go to the
/// lowest feature, then the lowest threshold. Empty when no split strictly
/// lowers the impurity.
std::optional<Split> best_split(std::span<const std::size_t> rows, const TaskDataset& data,
                                SplitCriterion criterion, std::size_t min_samples_leaf = 1);

/// Grows a tree on `rows` (typically one tree's in-bag sample). Nodes keep
/// splitting until pure, at max_depth, or too small for two leaves; an impure
/// node whose best split has zero gain is still split on that candidate.
DecisionTree grow_tree(const TaskDataset& data, std::span<const std::size_t> rows,
                       const ForestConfig& config, const SeedStream& seed);

}  // namespace odif

#endif  // ODIF_TREE_HPP_
