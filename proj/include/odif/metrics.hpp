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

#ifndef ODIF_METRICS_HPP_
#define ODIF_METRICS_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "odif/dataset.hpp"
#include "odif/omni_learner.hpp"
#include "odif/seed_stream.hpp"

namespace odif {

enum class Condition { kSingleTask, kUpToTask, kAllData };

std::string_view to_string(Condition condition);

/// Generalization-error estimate of one task under one training condition.
struct ErrorEstimate {
  TaskId task_id = 0;
  Condition condition = Condition::kAllData;
  std::vector<double> errors;  // one per repetition
  std::size_t n_train = 0;

  double mean() const;
  /// Sample standard deviation / sqrt(reps); 0 for a single repetition.
  double standard_error() const;
};

/// A ratio of mean errors; undefined when the denominator is zero.
struct Ratio {
  double value = 0.0;
  bool defined = false;

  static Ratio of(double numerator, double denominator);
  /// Natural log; only meaningful when defined and value > 0.
  std::optional<double> log() const;
};

/// 0-1 loss of `learner` on `test` (queried as test.task_id()).
double zero_one_error(const Learner& learner, const TaskDataset& test);

using LearnerFactory = std::function<std::unique_ptr<Learner>()>;
/// Training tasks for one repetition, in arrival order.
using TrainingSampler = std::function<std::vector<TaskDataset>(const SeedStream& rep_seed)>;

/// For each repetition r: draws training tasks from sampler(seed.child("rep", r)),
/// trains a fresh learner on them in order (task i seeded with
/// rep_seed.child("task", task_id)) and scores it on the fixed `test` set.
ErrorEstimate estimate_error(const LearnerFactory& factory, const TrainingSampler& sampler,
                             const TaskDataset& test, Condition condition,
                             std::size_t repetitions, const SeedStream& seed);

/// mean(single) / mean(all).
Ratio transfer_efficiency(const ErrorEstimate& single, const ErrorEstimate& all);
/// mean(single) / mean(up to and including the task).
Ratio forward_transfer(const ErrorEstimate& single, const ErrorEstimate& up_to);
/// mean(up to the task) / mean(all).
Ratio backward_transfer(const ErrorEstimate& up_to, const ErrorEstimate& all);

struct TaskTransfer {
  TaskId task_id = 0;
  double single_error = 0.0;
  double up_to_error = 0.0;
  double all_error = 0.0;
  Ratio te, fte, bte;
  std::size_t repetitions = 0;
};

struct TransferReport {
  std::vector<TaskTransfer> tasks;
};

/// TE, FTE and BTE of one task from its three estimates.
TaskTransfer transfer_for_task(const ErrorEstimate& single, const ErrorEstimate& up_to,
                               const ErrorEstimate& all);

/// |TE - FTE * BTE| per task (NaN where a ratio is undefined).
std::vector<double> factorization_check(const TransferReport& report);

}  // namespace odif

#endif  // ODIF_METRICS_HPP_
