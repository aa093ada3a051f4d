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

#include "odif/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "odif/errors.hpp"

namespace odif {

TaskDataset::TaskDataset(std::vector<double> features, std::size_t feature_count,
                         std::vector<Label> labels, TaskId task_id, std::size_t class_count)
    : features_(std::move(features)),
      feature_count_(feature_count),
      labels_(std::move(labels)),
      task_id_(task_id),
      class_count_(class_count) {
  if (feature_count_ == 0) throw DataError("dataset needs at least one feature");
  if (labels_.empty()) throw DataError("dataset needs at least one row");
  if (class_count_ < 2) throw DataError("class_count must be at least 2");
  if (task_id_ < 0) throw DataError("task id must be non-negative");
  if (features_.size() != labels_.size() * feature_count_) {
    throw DataError("feature matrix has " + std::to_string(features_.size()) +
                    " entries, expected " + std::to_string(labels_.size() * feature_count_));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= class_count_) {
      throw DataError("row " + std::to_string(i) + ": label " + std::to_string(labels_[i]) +
                      " >= class_count " + std::to_string(class_count_));
    }
  }
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (!std::isfinite(features_[i])) {
      throw DataError("row " + std::to_string(i / feature_count_) + ": non-finite feature value");
    }
  }
}

TaskDataset TaskDataset::select(std::span<const std::size_t> rows) const {
  std::vector<double> features;
  features.reserve(rows.size() * feature_count_);
  std::vector<Label> labels;
  labels.reserve(rows.size());
  for (std::size_t r : rows) {
    auto x = row(r);
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(labels_[r]);
  }
  return TaskDataset(std::move(features), feature_count_, std::move(labels), task_id_,
                     class_count_);
}

TaskDataset TaskDataset::head(std::size_t count) const {
  if (count == 0 || count > size()) {
    throw DataError("head(" + std::to_string(count) + ") of a dataset with " +
                    std::to_string(size()) + " rows");
  }
  std::vector<double> features(features_.begin(),
                               features_.begin() + static_cast<std::ptrdiff_t>(count * feature_count_));
  std::vector<Label> labels(labels_.begin(), labels_.begin() + static_cast<std::ptrdiff_t>(count));
  return TaskDataset(std::move(features), feature_count_, std::move(labels), task_id_,
                     class_count_);
}

TaskDataset TaskDataset::with_labels(std::vector<Label> labels) const {
  return TaskDataset(features_, feature_count_, std::move(labels), task_id_, class_count_);
}

TaskDataset TaskDataset::with_features(std::vector<double> features) const {
  return TaskDataset(std::move(features), feature_count_, labels_, task_id_, class_count_);
}

TaskDataset TaskDataset::with_task_id(TaskId task_id) const {
  return TaskDataset(features_, feature_count_, labels_, task_id, class_count_);
}

TaskSequence::TaskSequence(std::vector<TaskDataset> train, std::vector<TaskDataset> test)
    : train_(std::move(train)), test_(std::move(test)) {
  std::set<TaskId> seen;
  for (const auto& t : train_) {
    if (!seen.insert(t.task_id()).second) {
      throw DataError("duplicate task id " + std::to_string(t.task_id()) + " in sequence");
    }
  }
  if (!test_.empty()) {
    if (test_.size() != train_.size()) throw DataError("one test set per task required");
    for (std::size_t i = 0; i < train_.size(); ++i) {
      if (test_[i].task_id() != train_[i].task_id()) {
        throw DataError("test set " + std::to_string(i) + " belongs to a different task");
      }
      if (test_[i].feature_count() != train_[i].feature_count()) {
        throw DataError("test set " + std::to_string(i) + " has a different feature count");
      }
    }
  }
}

std::pair<TaskDataset, TaskDataset> split_train_test(const TaskDataset& data, double test_fraction,
                                                     const SeedStream& seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0, 1)");
  }
  const std::size_t n = data.size();
  const double n_test_exact = static_cast<double>(n) * test_fraction;
  if (n_test_exact < 1.0 || static_cast<double>(n) - n_test_exact < 1.0) {
    throw DataError("dataset with " + std::to_string(n) + " rows is too small to split");
  }
  auto n_test = static_cast<std::size_t>(std::llround(n_test_exact));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = seed.engine();
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {data.select(train), data.select(test)};
}

Subsample subsample_indices(std::size_t n, double fraction, const SeedStream& seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("subsample fraction must lie in (0, 1)");
  if (n < 2) throw DataError("need at least 2 rows to subsample");
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (k == 0 || k >= n) {
    throw DataError("subsampling " + std::to_string(n) + " rows at " + std::to_string(fraction) +
                    " leaves an empty in-bag or out-of-bag set");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = seed.engine();
  // Partial Fisher-Yates: the first k slots are the sample.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  Subsample out;
  out.in_bag.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  out.out_of_bag.assign(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
  std::sort(out.in_bag.begin(), out.in_bag.end());
  std::sort(out.out_of_bag.begin(), out.out_of_bag.end());
  return out;
}

Subsample bootstrap_indices(std::size_t n, double fraction, const SeedStream& seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("bootstrap fraction must lie in (0, 1]");
  if (n < 2) throw DataError("need at least 2 rows to bootstrap");
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
  auto rng = seed.engine();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<char> drawn(n, 0);
    Subsample out;
    out.in_bag.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t r = pick(rng);
      drawn[r] = 1;
      out.in_bag.push_back(r);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (!drawn[r]) out.out_of_bag.push_back(r);
    }
    if (!out.out_of_bag.empty()) {
      std::sort(out.in_bag.begin(), out.in_bag.end());
      return out;
    }
  }
  throw DataError("bootstrap could not leave any out-of-bag rows");
}

}  // namespace odif
