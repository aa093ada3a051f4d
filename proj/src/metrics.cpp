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

#include "odif/metrics.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "odif/errors.hpp"

namespace odif {

std::string_view to_string(Condition condition) {
  switch (condition) {
    case Condition::kSingleTask: return "single_task";
    case Condition::kUpToTask: return "up_to_task";
    case Condition::kAllData: return "all_data";
  }
  return "?";
}

double ErrorEstimate::mean() const {
  if (errors.empty()) return 0.0;
  return std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
}

double ErrorEstimate::standard_error() const {
  if (errors.size() < 2) return 0.0;
  const double m = mean();
  double ss = 0.0;
  for (double e : errors) ss += (e - m) * (e - m);
  const double n = static_cast<double>(errors.size());
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

Ratio Ratio::of(double numerator, double denominator) {
  if (denominator == 0.0 || !std::isfinite(numerator) || !std::isfinite(denominator)) return {};
  return {numerator / denominator, true};
}

std::optional<double> Ratio::log() const {
  if (!defined || !(value > 0.0)) return std::nullopt;
  return std::log(value);
}

double zero_one_error(const Learner& learner, const TaskDataset& test) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    wrong += learner.predict(test.task_id(), test.row(i)) != test.label(i);
  }
  return static_cast<double>(wrong) / static_cast<double>(test.size());
}

ErrorEstimate estimate_error(const LearnerFactory& factory, const TrainingSampler& sampler,
                             const TaskDataset& test, Condition condition,
                             std::size_t repetitions, const SeedStream& seed) {
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  ErrorEstimate est;
  est.task_id = test.task_id();
  est.condition = condition;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const SeedStream rep_seed = seed.child("rep", r);
    const auto train = sampler(rep_seed);
    if (train.empty()) throw DataError("empty training slice");
    auto learner = factory();
    std::size_t n = 0;
    for (const auto& task : train) {
      learner->add_task(task, rep_seed.child("task", static_cast<std::uint64_t>(task.task_id())));
      n += task.size();
    }
    est.n_train = n;
    est.errors.push_back(zero_one_error(*learner, test));
  }
  return est;
}

namespace {

void expect(const ErrorEstimate& e, Condition condition, const char* role) {
  if (e.condition != condition) {
    throw DataError(std::string(role) + " estimate must have condition " +
                    std::string(to_string(condition)));
  }
}

void expect_same_task(const ErrorEstimate& a, const ErrorEstimate& b) {
  if (a.task_id != b.task_id) throw DataError("estimates belong to different tasks");
}

}  // namespace

Ratio transfer_efficiency(const ErrorEstimate& single, const ErrorEstimate& all) {
  expect(single, Condition::kSingleTask, "numerator");
  expect(all, Condition::kAllData, "denominator");
  expect_same_task(single, all);
  return Ratio::of(single.mean(), all.mean());
}

Ratio forward_transfer(const ErrorEstimate& single, const ErrorEstimate& up_to) {
  expect(single, Condition::kSingleTask, "numerator");
  expect(up_to, Condition::kUpToTask, "denominator");
  expect_same_task(single, up_to);
  return Ratio::of(single.mean(), up_to.mean());
}

Ratio backward_transfer(const ErrorEstimate& up_to, const ErrorEstimate& all) {
  expect(up_to, Condition::kUpToTask, "numerator");
  expect(all, Condition::kAllData, "denominator");
  expect_same_task(up_to, all);
  return Ratio::of(up_to.mean(), all.mean());
}

TaskTransfer transfer_for_task(const ErrorEstimate& single, const ErrorEstimate& up_to,
                               const ErrorEstimate& all) {
  TaskTransfer t;
  t.task_id = single.task_id;
  t.single_error = single.mean();
  t.up_to_error = up_to.mean();
  t.all_error = all.mean();
  t.te = transfer_efficiency(single, all);
  t.fte = forward_transfer(single, up_to);
  t.bte = backward_transfer(up_to, all);
  t.repetitions = single.errors.size();
  return t;
}

std::vector<double> factorization_check(const TransferReport& report) {
  std::vector<double> residuals;
  residuals.reserve(report.tasks.size());
  for (const auto& t : report.tasks) {
    if (!t.te.defined || !t.fte.defined || !t.bte.defined) {
      residuals.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      residuals.push_back(std::abs(t.te.value - t.fte.value * t.bte.value));
    }
  }
  return residuals;
}

}  // namespace odif
