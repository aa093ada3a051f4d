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

#ifndef ODIF_OMNI_LEARNER_HPP_
#define ODIF_OMNI_LEARNER_HPP_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "odif/dataset.hpp"
#include "odif/forest.hpp"
#include "odif/seed_stream.hpp"
#include "odif/tree.hpp"
#include "odif/voter.hpp"

namespace odif {

enum class StrategyMode { kBuild, kRecruit, kHybrid };
enum class VoterKind { kLeaf, kKnn };

struct StrategyConfig {
  StrategyMode mode = StrategyMode::kBuild;
  std::size_t trees_per_task = 50;
  double recruit_eval_fraction = 0.3;
  double hybrid_build_fraction = 0.5;

  void validate() const;
  friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

struct LearnerConfig {
  ForestConfig forest;
  VoterKind voter_kind = VoterKind::kLeaf;
  double smoothing = 1.0;
  // 0 selects max(1, round(16 log2 n)).
  std::size_t knn_k = 0;
  StrategyConfig strategy;
  // Discard task data and skip backward voter updates.
  bool forward_only = false;
  // Workers for per-tree fitting. Results do not depend on it.
  unsigned threads = 1;

  void validate() const;
  friend bool operator==(const LearnerConfig&, const LearnerConfig&) = default;
};

/// Anything that learns a stream of tasks and predicts task-aware.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual void add_task(const TaskDataset& data, const SeedStream& seed) = 0;
  virtual Posterior predict_proba(TaskId task_id, std::span<const double> x) const = 0;
  virtual bool has_task(TaskId task_id) const = 0;

  std::size_t predict(TaskId task_id, std::span<const double> x) const {
    return predict_proba(task_id, x).argmax();
  }
};

struct TrainingStats {
  double representer_seconds = 0.0;
  double voter_seconds = 0.0;
};

/// Omnidirectional forest: one honest forest representer per task and a
/// voter for every (task, representer) pair. Predictions for a task average
/// the posteriors of all voters in that task's row, so new representers
/// help old tasks and old representers help new ones. Existing
/// representers and voter tables are never modified once fit.
class OmniLearner : public Learner {
 public:
  struct TaskRecord {
    TaskId task_id = 0;
    std::size_t class_count = 0;
    // Set for tasks added by recruiting: the row is pooled per tree rather
    // than per representer.
    bool tree_weighted = false;
    std::optional<TaskDataset> data;

    friend bool operator==(const TaskRecord&, const TaskRecord&) = default;
  };

  using VoterKey = std::pair<TaskId, TaskId>;  // (target task, representer task)

  explicit OmniLearner(LearnerConfig config = {});

  /// Builds a representer for `data`, its full voter row, and (unless
  /// forward_only) a voter on the new representer for every earlier task.
  void add_task(const TaskDataset& data, const SeedStream& seed) override;
  void add_task(const TaskDataset& data, const SeedStream& seed, const ForestConfig& forest);

  /// Adds a task by selecting the best existing trees (recruit) or a mix of
  /// new and existing trees (hybrid), as set by config().strategy.
  void add_task_recruiting(const TaskDataset& data, const SeedStream& seed);
  void add_task_recruiting(const TaskDataset& data, const SeedStream& seed,
                           const StrategyConfig& strategy, const ForestConfig& forest);

  Posterior predict_proba(TaskId task_id, std::span<const double> x) const override;
  bool has_task(TaskId task_id) const override;

  const LearnerConfig& config() const { return config_; }
  const std::vector<TaskRecord>& tasks() const { return tasks_; }
  const std::vector<std::shared_ptr<const ForestRepresenter>>& representers() const {
    return representers_;
  }
  const std::map<VoterKey, Voter>& voters() const { return voters_; }
  const Voter& voter(TaskId target, TaskId representer) const;
  const TrainingStats& stats() const { return stats_; }
  std::size_t feature_count() const { return feature_count_; }

  /// Reassembles a learner from persisted parts, validating consistency.
  static OmniLearner from_parts(LearnerConfig config, std::vector<TaskRecord> tasks,
                                std::vector<std::shared_ptr<const ForestRepresenter>> representers,
                                std::map<VoterKey, Voter> voters);

 private:
  const TaskRecord& record(TaskId task_id) const;
  void check_new_task(const TaskDataset& data) const;
  Voter fit_own_voter(const ForestRepresenter& rep, const TaskDataset& data) const;
  Voter fit_other_voter(const ForestRepresenter& rep, const TaskDataset& data) const;
  void add_representer(std::shared_ptr<const ForestRepresenter> rep, const TaskDataset& data);
  void retain(const TaskDataset& data, bool tree_weighted);

  LearnerConfig config_;
  std::size_t feature_count_ = 0;
  std::vector<TaskRecord> tasks_;
  std::vector<std::shared_ptr<const ForestRepresenter>> representers_;
  std::map<VoterKey, Voter> voters_;
  TrainingStats stats_;
};

/// Task-unaware baseline: one honest forest refit on the pooled data of all
/// tasks seen so far. With a single task it is exactly the single-task
/// OmniLearner.
class PooledForestLearner : public Learner {
 public:
  explicit PooledForestLearner(LearnerConfig config = {});

  void add_task(const TaskDataset& data, const SeedStream& seed) override;
  Posterior predict_proba(TaskId task_id, std::span<const double> x) const override;
  bool has_task(TaskId task_id) const override;

  /// The forest fit on everything seen so far; null before the first task.
  const OmniLearner* forest() const { return forest_ ? &*forest_ : nullptr; }

 private:
  LearnerConfig config_;
  std::vector<TaskDataset> seen_;
  std::optional<OmniLearner> forest_;
  TaskId pooled_id_ = 0;
};

}  // namespace odif

#endif  // ODIF_OMNI_LEARNER_HPP_
