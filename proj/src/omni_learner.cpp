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

#include "odif/omni_learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <tuple>

#include "odif/errors.hpp"

namespace odif {
namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

void StrategyConfig::validate() const {
  if (trees_per_task < 1) throw ConfigError("trees_per_task must be >= 1");
  if (!(recruit_eval_fraction > 0.0 && recruit_eval_fraction < 1.0)) {
    throw ConfigError("recruit_eval_fraction must lie in (0, 1)");
  }
  if (!(hybrid_build_fraction > 0.0 && hybrid_build_fraction < 1.0)) {
    throw ConfigError("hybrid_build_fraction must lie in (0, 1)");
  }
}

void LearnerConfig::validate() const {
  forest.validate();
  strategy.validate();
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) {
    throw ConfigError("smoothing must be a finite non-negative number");
  }
  if (voter_kind == VoterKind::kKnn && strategy.mode != StrategyMode::kBuild) {
    throw ConfigError("k-NN voters are only supported with the build strategy");
  }
}

OmniLearner::OmniLearner(LearnerConfig config) : config_(std::move(config)) {
  config_.validate();
}

bool OmniLearner::has_task(TaskId task_id) const {
  return std::any_of(tasks_.begin(), tasks_.end(),
                     [&](const TaskRecord& t) { return t.task_id == task_id; });
}

const OmniLearner::TaskRecord& OmniLearner::record(TaskId task_id) const {
  for (const auto& t : tasks_) {
    if (t.task_id == task_id) return t;
  }
  throw DataError("unknown task id " + std::to_string(task_id));
}

const Voter& OmniLearner::voter(TaskId target, TaskId representer) const {
  auto it = voters_.find({target, representer});
  if (it == voters_.end()) {
    throw DataError("no voter for task " + std::to_string(target) + " on representer " +
                    std::to_string(representer));
  }
  return it->second;
}

void OmniLearner::check_new_task(const TaskDataset& data) const {
  if (has_task(data.task_id())) {
    throw DataError("task id " + std::to_string(data.task_id()) + " was already added");
  }
  if (!tasks_.empty() && data.feature_count() != feature_count_) {
    throw DataError("task " + std::to_string(data.task_id()) + " has " +
                    std::to_string(data.feature_count()) + " features, learner expects " +
                    std::to_string(feature_count_));
  }
}

Voter OmniLearner::fit_own_voter(const ForestRepresenter& rep, const TaskDataset& data) const {
  if (config_.voter_kind == VoterKind::kKnn) return fit_knn_voter(rep, data, config_.knn_k);
  return fit_in_task_voter(rep, data, config_.smoothing);
}

Voter OmniLearner::fit_other_voter(const ForestRepresenter& rep, const TaskDataset& data) const {
  if (config_.voter_kind == VoterKind::kKnn) return fit_knn_voter(rep, data, config_.knn_k);
  return fit_cross_task_voter(rep, data, config_.smoothing);
}

// New representer for `data`: in-task voter plus the backward update of
// every earlier task that still has its data.
void OmniLearner::add_representer(std::shared_ptr<const ForestRepresenter> rep,
                                  const TaskDataset& data) {
  Stopwatch watch;
  voters_.emplace(VoterKey{data.task_id(), rep->source_task_id}, fit_own_voter(*rep, data));
  if (!config_.forward_only) {
    for (const auto& task : tasks_) {
      if (!task.data) continue;
      voters_.emplace(VoterKey{task.task_id, rep->source_task_id}, fit_other_voter(*rep, *task.data));
    }
  }
  representers_.push_back(std::move(rep));
  stats_.voter_seconds += watch.seconds();
}

void OmniLearner::retain(const TaskDataset& data, bool tree_weighted) {
  if (tasks_.empty()) feature_count_ = data.feature_count();
  TaskRecord rec;
  rec.task_id = data.task_id();
  rec.class_count = data.class_count();
  rec.tree_weighted = tree_weighted;
  if (!config_.forward_only) rec.data = data;
  tasks_.push_back(std::move(rec));
}

void OmniLearner::add_task(const TaskDataset& data, const SeedStream& seed) {
  add_task(data, seed, config_.forest);
}

void OmniLearner::add_task(const TaskDataset& data, const SeedStream& seed,
                           const ForestConfig& forest) {
  check_new_task(data);
  forest.validate();

  Stopwatch fit_watch;
  auto rep = std::make_shared<const ForestRepresenter>(
      fit_representer(data, forest, seed.child("representer"), config_.threads));
  stats_.representer_seconds += fit_watch.seconds();

  Stopwatch voter_watch;
  // Forward direction: the new task votes through every earlier representer.
  std::vector<std::pair<VoterKey, Voter>> row;
  for (const auto& prior : representers_) {
    row.emplace_back(VoterKey{data.task_id(), prior->source_task_id}, fit_other_voter(*prior, data));
  }
  for (auto& [key, v] : row) voters_.emplace(key, std::move(v));
  stats_.voter_seconds += voter_watch.seconds();

  add_representer(std::move(rep), data);
  retain(data, false);
}

void OmniLearner::add_task_recruiting(const TaskDataset& data, const SeedStream& seed) {
  add_task_recruiting(data, seed, config_.strategy, config_.forest);
}

void OmniLearner::add_task_recruiting(const TaskDataset& data, const SeedStream& seed,
                                      const StrategyConfig& strategy, const ForestConfig& forest) {
  strategy.validate();
  if (strategy.mode == StrategyMode::kBuild) {
    throw ConfigError("recruiting needs strategy mode 'recruit' or 'hybrid'");
  }
  if (config_.voter_kind != VoterKind::kLeaf) {
    throw ConfigError("recruiting needs leaf voters");
  }
  check_new_task(data);
  if (representers_.empty()) throw DataError("no existing representers to recruit from");

  std::size_t n_build = 0;
  if (strategy.mode == StrategyMode::kHybrid) {
    n_build = static_cast<std::size_t>(std::llround(strategy.hybrid_build_fraction *
                                                    static_cast<double>(strategy.trees_per_task)));
    n_build = std::min(n_build, strategy.trees_per_task);
  }
  const std::size_t n_recruit = strategy.trees_per_task - n_build;
  std::size_t available = 0;
  for (const auto& rep : representers_) available += rep->tree_count();
  if (available < n_recruit) {
    throw DataError("cannot recruit " + std::to_string(n_recruit) + " trees from " +
                    std::to_string(available) + " existing trees");
  }

  Stopwatch voter_watch;
  // (representer index, tree index) of the recruited trees.
  std::vector<std::vector<std::size_t>> chosen(representers_.size());
  if (n_recruit > 0) {
    auto [selection_train, selection_eval] =
        split_train_test(data, strategy.recruit_eval_fraction, seed.child("selection"));
    struct Scored {
      double accuracy;
      std::size_t rep;
      std::size_t tree;
    };
    std::vector<Scored> scored;
    for (std::size_t r = 0; r < representers_.size(); ++r) {
      const auto& rep = *representers_[r];
      const LeafVoter trial = fit_cross_task_voter(rep, selection_train, config_.smoothing);
      for (std::size_t b = 0; b < rep.tree_count(); ++b) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < selection_eval.size(); ++i) {
          const auto post = trial.posterior(b, rep.trees[b].leaf_of(selection_eval.row(i)));
          const auto best = static_cast<std::size_t>(std::max_element(post.begin(), post.end()) -
                                                     post.begin());
          correct += best == selection_eval.label(i);
        }
        scored.push_back({static_cast<double>(correct) / static_cast<double>(selection_eval.size()),
                          r, b});
      }
    }
    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
      return a.accuracy > b.accuracy;
    });
    for (std::size_t i = 0; i < n_recruit; ++i) chosen[scored[i].rep].push_back(scored[i].tree);
  }

  // Recruited trees vote with tables refit on the full task data.
  std::vector<std::pair<VoterKey, Voter>> row;
  for (std::size_t r = 0; r < representers_.size(); ++r) {
    if (chosen[r].empty()) continue;
    std::sort(chosen[r].begin(), chosen[r].end());
    row.emplace_back(VoterKey{data.task_id(), representers_[r]->source_task_id},
                     fit_cross_task_voter(*representers_[r], data, config_.smoothing, chosen[r]));
  }
  for (auto& [key, v] : row) voters_.emplace(key, std::move(v));
  stats_.voter_seconds += voter_watch.seconds();

  if (n_build > 0) {
    ForestConfig built = forest;
    built.n_estimators = n_build;
    built.validate();
    Stopwatch fit_watch;
    auto rep = std::make_shared<const ForestRepresenter>(
        fit_representer(data, built, seed.child("representer"), config_.threads));
    stats_.representer_seconds += fit_watch.seconds();
    add_representer(std::move(rep), data);
  }
  retain(data, true);
}

Posterior OmniLearner::predict_proba(TaskId task_id, std::span<const double> x) const {
  const TaskRecord& task = record(task_id);
  if (x.size() != feature_count_) {
    throw DataError("input has " + std::to_string(x.size()) + " features, learner expects " +
                    std::to_string(feature_count_));
  }
  Posterior out{std::vector<double>(task.class_count, 0.0)};
  std::size_t contributions = 0;
  for (const auto& rep : representers_) {
    auto it = voters_.find({task_id, rep->source_task_id});
    if (it == voters_.end()) continue;
    const LeafIds leaves = transform(*rep, x);
    if (task.tree_weighted) {
      contributions += accumulate_tree_votes(std::get<LeafVoter>(it->second), leaves, out.probs);
    } else {
      const Posterior p = vote(it->second, leaves);
      for (std::size_t c = 0; c < out.probs.size(); ++c) out.probs[c] += p.probs[c];
      ++contributions;
    }
  }
  if (contributions == 0) throw DataError("task " + std::to_string(task_id) + " has no voters");
  for (double& p : out.probs) p /= static_cast<double>(contributions);
  return out;
}

OmniLearner OmniLearner::from_parts(LearnerConfig config, std::vector<TaskRecord> tasks,
                                    std::vector<std::shared_ptr<const ForestRepresenter>> representers,
                                    std::map<VoterKey, Voter> voters) {
  OmniLearner learner(std::move(config));
  std::set<TaskId> task_ids;
  for (const auto& t : tasks) {
    if (!task_ids.insert(t.task_id).second) throw FormatError("duplicate task record");
    if (t.class_count < 2) throw FormatError("task record with fewer than 2 classes");
    if (t.data && (t.data->task_id() != t.task_id || t.data->class_count() != t.class_count)) {
      throw FormatError("retained data does not match its task record");
    }
  }
  std::set<TaskId> rep_ids;
  std::size_t p = 0;
  for (const auto& r : representers) {
    if (!r || !rep_ids.insert(r->source_task_id).second) throw FormatError("duplicate representer");
    if (!task_ids.count(r->source_task_id)) throw FormatError("representer for an unknown task");
    if (p == 0) p = r->feature_count;
    if (r->feature_count != p) throw FormatError("representers disagree on feature count");
  }
  for (const auto& [key, v] : voters) {
    if (!task_ids.count(key.first) || !rep_ids.count(key.second)) {
      throw FormatError("voter references an unknown task or representer");
    }
    const std::size_t k = std::visit([](const auto& x) { return x.class_count; }, v);
    const auto& task = *std::find_if(tasks.begin(), tasks.end(),
                                     [&](const TaskRecord& t) { return t.task_id == key.first; });
    if (k != task.class_count) throw FormatError("voter class count does not match its task");
    if (const auto* leaf = std::get_if<LeafVoter>(&v)) {
      const auto& rep = **std::find_if(representers.begin(), representers.end(),
                                       [&](const auto& r) { return r->source_task_id == key.second; });
      if (leaf->trees.size() != leaf->tables.size()) throw FormatError("voter table count mismatch");
      for (std::size_t i = 0; i < leaf->trees.size(); ++i) {
        if (leaf->trees[i] >= rep.tree_count() ||
            leaf->tables[i].size() != rep.trees[leaf->trees[i]].leaf_count() * k) {
          throw FormatError("voter table does not match its representer");
        }
      }
    }
  }
  for (const auto& t : tasks) {
    if (t.data && p != 0 && t.data->feature_count() != p) {
      throw FormatError("retained data has the wrong feature count");
    }
  }
  learner.feature_count_ = p;
  if (learner.feature_count_ == 0 && !tasks.empty() && tasks.front().data) {
    learner.feature_count_ = tasks.front().data->feature_count();
  }
  learner.tasks_ = std::move(tasks);
  learner.representers_ = std::move(representers);
  learner.voters_ = std::move(voters);
  return learner;
}

PooledForestLearner::PooledForestLearner(LearnerConfig config) : config_(std::move(config)) {
  config_.strategy.mode = StrategyMode::kBuild;
  config_.validate();
}

bool PooledForestLearner::has_task(TaskId task_id) const {
  return std::any_of(seen_.begin(), seen_.end(),
                     [&](const TaskDataset& t) { return t.task_id() == task_id; });
}

void PooledForestLearner::add_task(const TaskDataset& data, const SeedStream& seed) {
  if (has_task(data.task_id())) {
    throw DataError("task id " + std::to_string(data.task_id()) + " was already added");
  }
  if (!seen_.empty() && seen_.front().feature_count() != data.feature_count()) {
    throw DataError("task " + std::to_string(data.task_id()) + " has a different feature count");
  }
  seen_.push_back(data);
  if (seen_.size() == 1) pooled_id_ = data.task_id();

  std::vector<double> features;
  std::vector<Label> labels;
  std::size_t classes = 2;
  for (const auto& t : seen_) {
    features.insert(features.end(), t.features().begin(), t.features().end());
    labels.insert(labels.end(), t.labels().begin(), t.labels().end());
    classes = std::max(classes, t.class_count());
  }
  TaskDataset pooled(std::move(features), data.feature_count(), std::move(labels), pooled_id_,
                     classes);
  OmniLearner forest(config_);
  forest.add_task(pooled, seed);
  forest_.emplace(std::move(forest));
}

Posterior PooledForestLearner::predict_proba(TaskId task_id, std::span<const double> x) const {
  if (!has_task(task_id)) throw DataError("unknown task id " + std::to_string(task_id));
  return forest_->predict_proba(pooled_id_, x);
}

}  // namespace odif
