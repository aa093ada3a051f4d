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

#ifndef ODIF_DATASET_HPP_
#define ODIF_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "odif/seed_stream.hpp"

namespace odif {

using Label = std::uint32_t;
using TaskId = std::int64_t;

/// Row-major feature matrix, aligned labels and the task they belong to.
/// Validated on construction and immutable afterwards.
class TaskDataset {
 public:
  TaskDataset(std::vector<double> features, std::size_t feature_count, std::vector<Label> labels,
              TaskId task_id, std::size_t class_count);

  std::size_t size() const { return labels_.size(); }
  std::size_t feature_count() const { return feature_count_; }
  std::size_t class_count() const { return class_count_; }
  TaskId task_id() const { return task_id_; }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * feature_count_, feature_count_};
  }
  Label label(std::size_t i) const { return labels_[i]; }

  const std::vector<double>& features() const { return features_; }
  const std::vector<Label>& labels() const { return labels_; }

  /// Rows in the given order (duplicates allowed).
  TaskDataset select(std::span<const std::size_t> rows) const;
  /// The first `count` rows.
  TaskDataset head(std::size_t count) const;

  TaskDataset with_labels(std::vector<Label> labels) const;
  TaskDataset with_features(std::vector<double> features) const;
  TaskDataset with_task_id(TaskId task_id) const;

  friend bool operator==(const TaskDataset&, const TaskDataset&) = default;

 private:
  std::vector<double> features_;
  std::size_t feature_count_;
  std::vector<Label> labels_;
  TaskId task_id_;
  std::size_t class_count_;
};

/// Tasks in arrival order, each optionally paired with a held-out test set.
class TaskSequence {
 public:
  TaskSequence() = default;
  explicit TaskSequence(std::vector<TaskDataset> train, std::vector<TaskDataset> test = {});

  std::size_t size() const { return train_.size(); }
  const std::vector<TaskDataset>& train() const { return train_; }
  const std::vector<TaskDataset>& test() const { return test_; }
  bool has_test() const { return !test_.empty(); }

 private:
  std::vector<TaskDataset> train_;
  std::vector<TaskDataset> test_;
};

/// Random disjoint split into (train, test); both keep the input row order.
std::pair<TaskDataset, TaskDataset> split_train_test(const TaskDataset& data, double test_fraction,
                                                     const SeedStream& seed);

struct Subsample {
  std::vector<std::size_t> in_bag;
  std::vector<std::size_t> out_of_bag;
};

/// round(fraction * n) rows without replacement; the rest are out-of-bag.
/// Both sets are returned sorted.
Subsample subsample_indices(std::size_t n, double fraction, const SeedStream& seed);

/// round(fraction * n) draws with replacement. `in_bag` keeps the draw
/// multiplicities (sorted); `out_of_bag` holds the rows never drawn. Redraws
/// until the out-of-bag set is non-empty.
Subsample bootstrap_indices(std::size_t n, double fraction, const SeedStream& seed);

}  // namespace odif

#endif  // ODIF_DATASET_HPP_
