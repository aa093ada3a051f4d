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

#include "odif/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "odif/errors.hpp"

namespace odif {
namespace {

// Gains closer than this are treated as equal so that the lowest
// (feature, threshold) wins regardless of summation order.
constexpr double kGainTolerance = 1e-12;

struct Candidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
};

std::optional<Candidate> find_candidate(std::span<const std::size_t> rows, const TaskDataset& data,
                                        std::span<const std::size_t> features,
                                        SplitCriterion criterion, std::size_t min_samples_leaf) {
  const std::size_t k = data.class_count();
  const std::size_t m = rows.size();
  if (m < 2 * std::max<std::size_t>(min_samples_leaf, 1)) return std::nullopt;

  std::vector<std::size_t> parent(k, 0);
  for (std::size_t r : rows) ++parent[data.label(r)];
  const double parent_impurity = node_impurity(parent, m, criterion);

  std::optional<Candidate> best;
  std::vector<std::pair<double, Label>> column(m);
  std::vector<std::size_t> left(k), right(k);
  for (std::size_t f : features) {
    for (std::size_t i = 0; i < m; ++i) {
      column[i] = {data.row(rows[i])[f], data.label(rows[i])};
    }
    std::sort(column.begin(), column.end());
    std::fill(left.begin(), left.end(), 0);
    right = parent;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      ++left[column[i].second];
      --right[column[i].second];
      const std::size_t n_left = i + 1;
      const std::size_t n_right = m - n_left;
      if (!(column[i].first < column[i + 1].first)) continue;
      if (n_left < min_samples_leaf || n_right < min_samples_leaf) continue;
      const double child = (static_cast<double>(n_left) * node_impurity(left, n_left, criterion) +
                            static_cast<double>(n_right) * node_impurity(right, n_right, criterion)) /
                           static_cast<double>(m);
      const double gain = parent_impurity - child;
      if (best && !(gain > best->gain + kGainTolerance)) continue;
      const double lo = column[i].first;
      const double hi = column[i + 1].first;
      double threshold = lo + (hi - lo) / 2.0;
      // Keep lo < threshold <= hi under rounding so the strict-less rule
      // still sends lo left and hi right.
      if (!(threshold > lo)) threshold = hi;
      best = Candidate{f, threshold, gain};
    }
  }
  return best;
}

bool is_pure(std::span<const std::size_t> rows, const TaskDataset& data) {
  return std::all_of(rows.begin(), rows.end(),
                     [&](std::size_t r) { return data.label(r) == data.label(rows.front()); });
}

class TreeGrower {
 public:
  TreeGrower(const TaskDataset& data, const ForestConfig& config, const SeedStream& seed)
      : data_(data), config_(config), rng_(seed.engine()), all_features_(data.feature_count()) {
    std::iota(all_features_.begin(), all_features_.end(), 0);
  }

  std::vector<TreeNode> grow(std::vector<std::size_t> rows) {
    nodes_.clear();
    next_leaf_ = 0;
    grow_node(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  std::int32_t grow_node(std::vector<std::size_t> rows, std::size_t depth) {
    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();

    std::optional<Candidate> split;
    if (depth < config_.max_depth && !is_pure(rows, data_)) {
      split = find_candidate(rows, data_, features_for_node(), config_.criterion,
                             config_.min_samples_leaf);
    }
    if (!split) {
      nodes_[static_cast<std::size_t>(index)].leaf_id = next_leaf_++;
      return index;
    }

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (data_.row(r)[split->feature] < split->threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const std::int32_t l = grow_node(std::move(left), depth + 1);
    const std::int32_t r = grow_node(std::move(right), depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(index)];
    node.feature = static_cast<std::int32_t>(split->feature);
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return index;
  }

  std::span<const std::size_t> features_for_node() {
    const std::size_t p = all_features_.size();
    if (config_.max_features == 0 || config_.max_features >= p) return all_features_;
    subset_ = all_features_;
    for (std::size_t i = 0; i < config_.max_features; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, p - 1);
      std::swap(subset_[i], subset_[pick(rng_)]);
    }
    subset_.resize(config_.max_features);
    std::sort(subset_.begin(), subset_.end());
    return subset_;
  }

  const TaskDataset& data_;
  const ForestConfig& config_;
  Rng rng_;
  std::vector<std::size_t> all_features_;
  std::vector<std::size_t> subset_;
  std::vector<TreeNode> nodes_;
  std::int32_t next_leaf_ = 0;
};

}  // namespace

void ForestConfig::validate() const {
  if (n_estimators < 1) throw ConfigError("n_estimators must be >= 1");
  if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (!(max_samples > 0.0 && max_samples < 1.0)) throw ConfigError("max_samples must lie in (0, 1)");
  if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be >= 1");
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw DataError("tree has no nodes");
  std::vector<char> visited(nodes_.size(), 0);
  std::vector<char> leaf_seen;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [index, depth] = stack.back();
    stack.pop_back();
    if (index < 0 || static_cast<std::size_t>(index) >= nodes_.size()) {
      throw DataError("tree node reference out of range");
    }
    if (visited[static_cast<std::size_t>(index)]++) throw DataError("tree node reached twice");
    depth_ = std::max(depth_, depth);
    const auto& node = nodes_[static_cast<std::size_t>(index)];
    if (node.is_leaf()) {
      if (node.leaf_id < 0) throw DataError("leaf without id");
      const auto id = static_cast<std::size_t>(node.leaf_id);
      if (leaf_seen.size() <= id) leaf_seen.resize(id + 1, 0);
      if (leaf_seen[id]++) throw DataError("duplicate leaf id " + std::to_string(id));
      ++leaf_count_;
    } else {
      if (!std::isfinite(node.threshold)) throw DataError("non-finite split threshold");
      stack.emplace_back(node.right, depth + 1);
      stack.emplace_back(node.left, depth + 1);
    }
  }
  if (leaf_seen.size() != leaf_count_) throw DataError("leaf ids are not contiguous");
  if (std::find(visited.begin(), visited.end(), 0) != visited.end()) {
    throw DataError("unreachable tree node");
  }
}

std::int32_t DecisionTree::leaf_of(std::span<const double> x) const {
  const TreeNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    const auto f = static_cast<std::size_t>(node->feature);
    node = &nodes_[static_cast<std::size_t>(x[f] < node->threshold ? node->left : node->right)];
  }
  return node->leaf_id;
}

double node_impurity(std::span<const std::size_t> class_counts, std::size_t total,
                     SplitCriterion criterion) {
  if (total == 0) return 0.0;
  const double n = static_cast<double>(total);
  double acc = 0.0;
  if (criterion == SplitCriterion::kGini) {
    for (std::size_t c : class_counts) {
      const double q = static_cast<double>(c) / n;
      acc += q * q;
    }
    return 1.0 - acc;
  }
  for (std::size_t c : class_counts) {
    if (c == 0) continue;
    const double q = static_cast<double>(c) / n;
    acc -= q * std::log2(q);
  }
  return acc;
}

std::optional<Split> best_split(std::span<const std::size_t> rows, const TaskDataset& data,
                                SplitCriterion criterion, std::size_t min_samples_leaf) {
  std::vector<std::size_t> features(data.feature_count());
  std::iota(features.begin(), features.end(), 0);
  auto candidate = find_candidate(rows, data, features, criterion, min_samples_leaf);
  if (!candidate || !(candidate->gain > kGainTolerance)) return std::nullopt;
  return Split{candidate->feature, candidate->threshold, candidate->gain};
}

DecisionTree grow_tree(const TaskDataset& data, std::span<const std::size_t> rows,
                       const ForestConfig& config, const SeedStream& seed) {
  if (rows.empty()) throw DataError("cannot grow a tree on zero rows");
  TreeGrower grower(data, config, seed);
  return DecisionTree(grower.grow(std::vector<std::size_t>(rows.begin(), rows.end())));
}

}  // namespace odif
