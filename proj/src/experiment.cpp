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

#include "odif/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <tuple>

#include "odif/csv_io.hpp"
#include "odif/environments.hpp"
#include "odif/errors.hpp"
#include "odif/parallel.hpp"
#include "odif/serialization.hpp"

namespace odif {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Transfer protocol: every task is measured under single_task, up_to_task and
// all_data at each checkpoint of per-task sample sizes.

struct Draw {
  std::vector<TaskDataset> train;  // full-size; checkpoints take prefixes
  std::vector<TaskDataset> test;
};

struct Scenario {
  double param = 0.0;
  std::function<Draw(const SeedStream& rep_seed)> draw;
  std::vector<std::vector<std::size_t>> checkpoints;
};

enum class LearnerKind { kOdif, kPooled };

std::string learner_name(LearnerKind kind) { return kind == LearnerKind::kOdif ? "odif" : "rf"; }

std::unique_ptr<Learner> make_learner(LearnerKind kind, const LearnerConfig& config) {
  if (kind == LearnerKind::kOdif) return std::make_unique<OmniLearner>(config);
  return std::make_unique<PooledForestLearner>(config);
}

std::size_t model_bytes(const Learner& learner) {
  if (const auto* omni = dynamic_cast<const OmniLearner*>(&learner)) {
    return serialize_model(*omni).size();
  }
  if (const auto* pooled = dynamic_cast<const PooledForestLearner*>(&learner)) {
    return pooled->forest() ? serialize_model(*pooled->forest()).size() : 0;
  }
  return 0;
}

SeedStream task_seed(const SeedStream& rep_seed, const TaskDataset& data) {
  return rep_seed.child("task", static_cast<std::uint64_t>(data.task_id()));
}

int condition_rank(std::string_view c) {
  if (c == "single_task") return 0;
  if (c == "up_to_task") return 1;
  if (c == "all_data") return 2;
  return 3;
}

void sort_rows(std::vector<ResultRow>& rows) {
  auto key = [](const ResultRow& r) {
    return std::make_tuple(r.param, r.learner,
                           r.repetition < 0 ? std::numeric_limits<int>::max() : r.repetition,
                           r.checkpoint, r.task_id, condition_rank(r.condition), r.condition);
  };
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const ResultRow& a, const ResultRow& b) { return key(a) < key(b); });
}

std::vector<ResultRow> run_transfer_job(const std::string& experiment, const Scenario& scenario,
                                        std::size_t rep, const SeedStream& root,
                                        const LearnerConfig& learner_config,
                                        const std::vector<LearnerKind>& kinds) {
  const SeedStream rep_seed = root.child("rep", rep);
  const Draw draw = scenario.draw(rep_seed);
  std::vector<ResultRow> rows;
  LearnerConfig config = learner_config;
  config.threads = 1;

  auto make_row = [&](LearnerKind kind, std::size_t checkpoint, const TaskDataset& task,
                      std::size_t n_task, std::size_t n_seen, Condition condition, double error,
                      double ms, std::size_t bytes) {
    ResultRow row;
    row.experiment = experiment;
    row.learner = learner_name(kind);
    row.param = scenario.param;
    row.repetition = static_cast<int>(rep);
    row.checkpoint = checkpoint;
    row.task_id = task.task_id();
    row.n_task = n_task;
    row.n_seen = n_seen;
    row.condition = std::string(to_string(condition));
    row.error = error;
    row.wall_time_ms = ms;
    row.model_bytes = bytes;
    rows.push_back(std::move(row));
  };

  for (std::size_t c = 0; c < scenario.checkpoints.size(); ++c) {
    const auto& sizes = scenario.checkpoints[c];
    std::vector<TaskDataset> prefix;
    std::size_t total = 0;
    for (std::size_t t = 0; t < draw.train.size(); ++t) {
      prefix.push_back(draw.train[t].head(sizes[t]));
      total += sizes[t];
    }
    for (LearnerKind kind : kinds) {
      for (std::size_t t = 0; t < prefix.size(); ++t) {
        auto learner = make_learner(kind, config);
        const auto start = Clock::now();
        learner->add_task(prefix[t], task_seed(rep_seed, prefix[t]));
        const double ms = elapsed_ms(start);
        make_row(kind, c, prefix[t], sizes[t], sizes[t], Condition::kSingleTask,
                 zero_one_error(*learner, draw.test[t]), ms, model_bytes(*learner));
      }
      auto learner = make_learner(kind, config);
      double ms = 0.0;
      std::size_t seen = 0;
      for (std::size_t t = 0; t < prefix.size(); ++t) {
        const auto start = Clock::now();
        learner->add_task(prefix[t], task_seed(rep_seed, prefix[t]));
        ms += elapsed_ms(start);
        seen += sizes[t];
        make_row(kind, c, prefix[t], sizes[t], seen, Condition::kUpToTask,
                 zero_one_error(*learner, draw.test[t]), ms, 0);
      }
      const std::size_t bytes = model_bytes(*learner);
      for (std::size_t t = 0; t < prefix.size(); ++t) {
        make_row(kind, c, prefix[t], sizes[t], total, Condition::kAllData,
                 zero_one_error(*learner, draw.test[t]), ms, bytes);
      }
    }
  }
  return rows;
}

ExperimentResult run_transfer(const ExperimentConfig& config, const std::vector<Scenario>& scenarios,
                              const std::vector<LearnerKind>& kinds) {
  const std::string experiment(to_string(config.kind));
  const SeedStream root(config.seed);
  const std::size_t reps = config.repetitions;
  std::vector<std::vector<ResultRow>> per_job(scenarios.size() * reps);
  parallel_for(per_job.size(), config.threads, [&](std::size_t job) {
    per_job[job] = run_transfer_job(experiment, scenarios[job / reps], job % reps, root,
                                    config.learner, kinds);
  });

  ExperimentResult result;
  for (auto& rows : per_job) {
    for (auto& r : rows) result.rows.push_back(std::move(r));
  }
  sort_rows(result.rows);

  // Group per-repetition errors (rows are sorted, so repetitions arrive in order).
  using Key = std::tuple<double, std::string, std::size_t, TaskId>;
  struct Group {
    ErrorEstimate single, up_to, all;
    std::size_t n_task = 0;
    std::size_t n_total = 0;
  };
  std::map<Key, Group> groups;
  std::vector<Key> order;
  for (const auto& r : result.rows) {
    const Key key{r.param, r.learner, r.checkpoint, r.task_id};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    Group& g = it->second;
    g.n_task = r.n_task;
    ErrorEstimate* target = nullptr;
    if (r.condition == "single_task") {
      target = &g.single;
      target->condition = Condition::kSingleTask;
    } else if (r.condition == "up_to_task") {
      target = &g.up_to;
      target->condition = Condition::kUpToTask;
    } else {
      target = &g.all;
      target->condition = Condition::kAllData;
      g.n_total = r.n_seen;
    }
    target->task_id = r.task_id;
    target->n_train = r.n_seen;
    target->errors.push_back(*r.error);
  }
  for (const auto& key : order) {
    const Group& g = groups.at(key);
    TransferSummary s;
    s.param = std::get<0>(key);
    s.learner = std::get<1>(key);
    s.checkpoint = std::get<2>(key);
    s.n_task = g.n_task;
    s.n_total = g.n_total;
    s.single = g.single;
    s.up_to = g.up_to;
    s.all = g.all;
    s.transfer = transfer_for_task(g.single, g.up_to, g.all);

    ResultRow row;
    row.experiment = experiment;
    row.learner = s.learner;
    row.param = s.param;
    row.repetition = -1;
    row.checkpoint = s.checkpoint;
    row.task_id = std::get<3>(key);
    row.n_task = s.n_task;
    row.n_seen = s.n_total;
    row.condition = "transfer";
    row.error = s.all.mean();
    row.te = s.transfer.te;
    row.fte = s.transfer.fte;
    row.bte = s.transfer.bte;
    result.rows.push_back(std::move(row));
    result.transfers.push_back(std::move(s));
  }
  sort_rows(result.rows);
  return result;
}

// ---------------------------------------------------------------------------
// Scenario builders.

XorSpec xor_spec(std::size_t n, double variance, double angle, bool flip, const SeedStream& seed,
                 TaskId id) {
  XorSpec s;
  s.n = n;
  s.variance = variance;
  s.angle_degrees = angle;
  s.label_flip = flip;
  s.seed = seed;
  s.task_id = id;
  return s;
}

std::size_t max_of(const std::vector<std::size_t>& v) { return *std::max_element(v.begin(), v.end()); }

std::vector<Scenario> xor_xnor_scenarios(const ExperimentConfig& config) {
  const auto& p = config.xor_xnor;
  const SeedStream root(config.seed);
  std::vector<TaskDataset> tests{
      generate_xor(xor_spec(p.n_test, p.variance, 0, false, root.child("test", 0), 0)),
      generate_xor(xor_spec(p.n_test, p.variance, 0, true, root.child("test", 1), 1))};
  Scenario s;
  s.draw = [p, tests](const SeedStream& rep) {
    return Draw{{generate_xor(xor_spec(p.n_first, p.variance, 0, false, rep.child("data", 0), 0)),
                 generate_xor(xor_spec(max_of(p.second_sizes), p.variance, 0, true,
                                       rep.child("data", 1), 1))},
                tests};
  };
  for (std::size_t n : p.second_sizes) s.checkpoints.push_back({p.n_first, n});
  return {s};
}

std::vector<Scenario> angle_scenarios(const ExperimentConfig& config, bool post_rotate) {
  const auto& p = post_rotate ? config.rotation_sweep : config.rxor_sweep;
  const SeedStream root(config.seed);
  std::vector<Scenario> out;
  for (double angle : p.angles) {
    auto second = [p, angle, post_rotate](std::size_t n, const SeedStream& seed) {
      if (post_rotate) {
        return rotate_features(generate_xor(xor_spec(n, p.variance, 0, false, seed, 1)), angle);
      }
      return generate_xor(xor_spec(n, p.variance, angle, false, seed, 1));
    };
    std::vector<TaskDataset> tests{
        generate_xor(xor_spec(p.n_test, p.variance, 0, false, root.child("test", 0), 0)),
        second(p.n_test, root.child("test", 1))};
    Scenario s;
    s.param = angle;
    s.draw = [p, tests, second](const SeedStream& rep) {
      return Draw{{generate_xor(xor_spec(p.n_per_task, p.variance, 0, false, rep.child("data", 0), 0)),
                   second(p.n_per_task, rep.child("data", 1))},
                  tests};
    };
    s.checkpoints.push_back({p.n_per_task, p.n_per_task});
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Scenario> sample_sweep_scenarios(const ExperimentConfig& config) {
  const auto& p = config.rxor_sample_sweep;
  const SeedStream root(config.seed);
  std::vector<TaskDataset> tests{
      generate_xor(xor_spec(p.n_test, p.variance, 0, false, root.child("test", 0), 0)),
      generate_xor(xor_spec(p.n_test, p.variance, p.angle, false, root.child("test", 1), 1))};
  Scenario s;
  s.param = p.angle;
  const std::size_t n_max = max_of(p.sample_sizes);
  const std::size_t n_first = p.n_first > 0 ? p.n_first : n_max;
  s.draw = [p, tests, n_max, n_first](const SeedStream& rep) {
    return Draw{{generate_xor(xor_spec(n_first, p.variance, 0, false, rep.child("data", 0), 0)),
                 generate_xor(xor_spec(n_max, p.variance, p.angle, false, rep.child("data", 1), 1))},
                tests};
  };
  for (std::size_t n : p.sample_sizes) s.checkpoints.push_back({p.n_first > 0 ? p.n_first : n, n});
  return {s};
}

SpiralSpec spiral_spec(const SpiralTaskParams& t, std::size_t n, const SeedStream& seed, TaskId id) {
  SpiralSpec s;
  s.classes = t.classes;
  s.n = n;
  s.turns = t.turns;
  s.noise_variance = t.noise_variance;
  s.seed = seed;
  s.task_id = id;
  return s;
}

std::vector<Scenario> spiral_scenarios(const ExperimentConfig& config) {
  const auto& p = config.spirals;
  const SeedStream root(config.seed);
  std::vector<TaskDataset> tests{generate_spirals(spiral_spec(p.first, p.n_test, root.child("test", 0), 0)),
                                 generate_spirals(spiral_spec(p.second, p.n_test, root.child("test", 1), 1))};
  Scenario s;
  s.draw = [p, tests](const SeedStream& rep) {
    return Draw{{generate_spirals(spiral_spec(p.first, p.n_first, rep.child("data", 0), 0)),
                 generate_spirals(spiral_spec(p.second, max_of(p.second_sizes), rep.child("data", 1), 1))},
                tests};
  };
  for (std::size_t n : p.second_sizes) s.checkpoints.push_back({p.n_first, n});
  return {s};
}

std::vector<Scenario> label_shuffle_scenarios(const ExperimentConfig& config) {
  const auto& p = config.label_shuffle;
  const SeedStream root(config.seed);
  std::vector<TaskDataset> base_tests;
  for (std::size_t t = 0; t < p.n_tasks; ++t) {
    base_tests.push_back(generate_xor(xor_spec(p.n_test, p.variance, 0, t > 0,
                                               root.child("test", t), static_cast<TaskId>(t))));
  }
  std::vector<Scenario> out;
  for (int shuffled = 0; shuffled <= 1; ++shuffled) {
    Scenario s;
    s.param = shuffled;
    s.draw = [p, base_tests, shuffled](const SeedStream& rep) {
      Draw d;
      for (std::size_t t = 0; t < p.n_tasks; ++t) {
        TaskDataset train = generate_xor(
            xor_spec(p.n_per_task, p.variance, 0, t > 0, rep.child("data", t), static_cast<TaskId>(t)));
        TaskDataset test = base_tests[t];
        if (shuffled && t > 0) {
          // Same permutation for train and test: the task's concept is relabeled.
          train = shuffle_labels(train, rep.child("shuffle", t));
          test = shuffle_labels(test, rep.child("shuffle", t));
        }
        d.train.push_back(std::move(train));
        d.test.push_back(std::move(test));
      }
      return d;
    };
    s.checkpoints.push_back(std::vector<std::size_t>(p.n_tasks, p.n_per_task));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Scenario> csv_scenarios(const ExperimentConfig& config) {
  const auto& p = config.custom_csv;
  const TaskSequence seq = read_task_csv(std::filesystem::path(p.path));
  if (seq.size() == 0) throw DataError(p.path + ": no tasks");
  Scenario s;
  std::vector<std::size_t> sizes;
  for (const auto& task : seq.train()) {
    sizes.push_back(split_train_test(task, p.test_fraction, SeedStream(0)).first.size());
  }
  s.checkpoints.push_back(sizes);
  s.draw = [seq, p](const SeedStream& rep) {
    Draw d;
    for (std::size_t t = 0; t < seq.size(); ++t) {
      auto [train, test] = split_train_test(seq.train()[t], p.test_fraction, rep.child("split", t));
      d.train.push_back(std::move(train));
      d.test.push_back(std::move(test));
    }
    return d;
  };
  return {s};
}

// ---------------------------------------------------------------------------
// Recruitment: prior tasks are built with trees_per_task trees each; the last
// task is added by building, recruiting, hybrid, or a standalone forest.

ExperimentResult run_recruitment(const ExperimentConfig& config) {
  const auto& p = config.recruitment;
  const std::string experiment(to_string(config.kind));
  const SeedStream root(config.seed);
  LearnerConfig base_config = config.learner;
  base_config.threads = 1;
  base_config.forest.n_estimators = base_config.strategy.trees_per_task;
  const TaskId last = static_cast<TaskId>(p.n_tasks - 1);
  const std::size_t n_max = max_of(p.new_task_sizes);
  const std::vector<std::string> strategies{"build", "recruit", "hybrid", "uf"};

  std::vector<std::vector<ResultRow>> per_rep(config.repetitions);
  parallel_for(config.repetitions, config.threads, [&](std::size_t rep) {
    const SeedStream rep_seed = root.child("rep", rep);
    auto make_task = [&](TaskId id, std::size_t n, const SeedStream& data_seed) {
      if (p.environment == "rotation") {
        std::uniform_real_distribution<double> angle(0.0, 360.0);
        auto rng = rep_seed.child("angle", static_cast<std::uint64_t>(id)).engine();
        return generate_xor(xor_spec(n, p.variance, angle(rng), false, data_seed, id));
      }
      return shuffle_labels(generate_xor(xor_spec(n, p.variance, 0, false, data_seed, id)),
                            rep_seed.child("shuffle", static_cast<std::uint64_t>(id)));
    };
    OmniLearner base(base_config);
    for (TaskId t = 0; t < last; ++t) {
      const TaskDataset data = make_task(t, p.n_prior, rep_seed.child("data", static_cast<std::uint64_t>(t)));
      base.add_task(data, task_seed(rep_seed, data));
    }
    const TaskDataset full = make_task(last, n_max, rep_seed.child("data", static_cast<std::uint64_t>(last)));
    const TaskDataset test = make_task(last, p.n_test, root.child("test", static_cast<std::uint64_t>(last)));

    for (std::size_t c = 0; c < p.new_task_sizes.size(); ++c) {
      const std::size_t m = p.new_task_sizes[c];
      const TaskDataset data = full.head(m);
      const SeedStream seed = task_seed(rep_seed, data);
      for (const auto& strategy : strategies) {
        std::optional<OmniLearner> learner;
        const auto start = Clock::now();
        if (strategy == "uf") {
          learner.emplace(base_config);
          learner->add_task(data, seed);
        } else {
          learner.emplace(base);
          if (strategy == "build") {
            learner->add_task(data, seed);
          } else {
            StrategyConfig s = base_config.strategy;
            s.mode = strategy == "recruit" ? StrategyMode::kRecruit : StrategyMode::kHybrid;
            learner->add_task_recruiting(data, seed, s, base_config.forest);
          }
        }
        const double ms = elapsed_ms(start);
        ResultRow row;
        row.experiment = experiment;
        row.learner = strategy;
        row.repetition = static_cast<int>(rep);
        row.checkpoint = c;
        row.task_id = last;
        row.n_task = m;
        row.n_seen = strategy == "uf" ? m : m + p.n_prior * static_cast<std::size_t>(last);
        row.condition = "all_data";
        row.error = zero_one_error(*learner, test);
        row.wall_time_ms = ms;
        row.model_bytes = serialize_model(*learner).size();
        per_rep[rep].push_back(std::move(row));
      }
    }
  });

  ExperimentResult result;
  for (auto& rows : per_rep) {
    for (auto& r : rows) result.rows.push_back(std::move(r));
  }
  sort_rows(result.rows);
  std::map<std::pair<std::string, std::size_t>, RecruitSummary> groups;
  for (const auto& r : result.rows) {
    auto& g = groups[{r.learner, r.checkpoint}];
    g.strategy = r.learner;
    g.n_new = r.n_task;
    g.error.task_id = r.task_id;
    g.error.condition = Condition::kAllData;
    g.error.n_train = r.n_seen;
    g.error.errors.push_back(*r.error);
  }
  for (auto& [key, g] : groups) {
    ResultRow row;
    row.experiment = experiment;
    row.learner = g.strategy;
    row.repetition = -1;
    row.checkpoint = key.second;
    row.task_id = last;
    row.n_task = g.n_new;
    row.n_seen = g.error.n_train;
    row.condition = "mean";
    row.error = g.error.mean();
    result.rows.push_back(std::move(row));
    result.recruitment.push_back(std::move(g));
  }
  sort_rows(result.rows);
  return result;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string ratio_cell(const std::optional<Ratio>& r) {
  if (!r) return "NA";
  if (!r->defined) return "undef";
  return format_double(r->value);
}

std::string log_cell(const std::optional<Ratio>& r) {
  if (!r) return "NA";
  const auto l = r->log();
  return l ? format_double(*l) : "undef";
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("slope fit: x and y differ in length");
  if (x.size() < 3) throw ConfigError("slope fit: need at least 3 points, got " + std::to_string(x.size()));
  double mx = 0.0, my = 0.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigError("slope fit: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    mx += lx.back();
    my += ly.back();
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw ConfigError("slope fit: x values are all equal");
  return sxy / sxx;
}

ExperimentResult run_scaling(const ExperimentConfig& config) {
  ExperimentConfig checked = config;
  checked.kind = ExperimentKind::kScaling;
  checked.validate();
  const auto& p = config.scaling;
  const SeedStream root(config.seed);
  LearnerConfig learner_config = config.learner;
  learner_config.threads = 1;

  ExperimentResult result;
  for (std::size_t g = 0; g < p.grid.size(); ++g) {
    const std::size_t total = p.grid[g];
    const std::size_t tasks = total / p.task_size;
    std::vector<double> fit_ms, rep_ms;
    ScalingPoint point;
    point.n = total;
    point.tasks = tasks;
    for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
      const SeedStream rep_seed = root.child("rep", rep);
      std::vector<TaskDataset> data;
      for (std::size_t t = 0; t < tasks; ++t) {
        data.push_back(generate_xor(xor_spec(p.task_size, p.variance, std::fmod(37.0 * static_cast<double>(t), 360.0),
                                             false, rep_seed.child("data", t), static_cast<TaskId>(t))));
      }
      OmniLearner learner(learner_config);
      const auto start = Clock::now();
      for (const auto& d : data) learner.add_task(d, task_seed(rep_seed, d));
      fit_ms.push_back(elapsed_ms(start));
      rep_ms.push_back(learner.stats().representer_seconds * 1000.0);
      point.model_bytes = serialize_model(learner).size();
      point.representation_bytes = 0;
      for (const auto& r : learner.representers()) point.representation_bytes += canonical_bytes(*r).size();

      for (int which = 0; which < 2; ++which) {
        ResultRow row;
        row.experiment = "scaling";
        row.learner = "odif";
        row.param = static_cast<double>(tasks);
        row.repetition = static_cast<int>(rep);
        row.checkpoint = g;
        row.task_id = -1;
        row.n_task = p.task_size;
        row.n_seen = total;
        row.condition = which == 0 ? "full_learner" : "representation";
        row.wall_time_ms = which == 0 ? fit_ms.back() : rep_ms.back();
        row.model_bytes = which == 0 ? point.model_bytes : point.representation_bytes;
        result.rows.push_back(std::move(row));
      }
    }
    point.fit_ms = median(fit_ms);
    point.representation_fit_ms = median(rep_ms);
    result.scaling_points.push_back(point);
  }
  std::vector<double> n, t, s, rt, rs;
  for (const auto& pt : result.scaling_points) {
    n.push_back(static_cast<double>(pt.n));
    t.push_back(pt.fit_ms);
    s.push_back(static_cast<double>(pt.model_bytes));
    rt.push_back(pt.representation_fit_ms);
    rs.push_back(static_cast<double>(pt.representation_bytes));
  }
  result.scaling_fit = ScalingFit{fit_loglog_slope(n, t), fit_loglog_slope(n, s),
                                  fit_loglog_slope(n, rt), fit_loglog_slope(n, rs)};
  sort_rows(result.rows);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::vector<LearnerKind> both{LearnerKind::kOdif, LearnerKind::kPooled};
  switch (config.kind) {
    case ExperimentKind::kXorXnor: return run_transfer(config, xor_xnor_scenarios(config), both);
    case ExperimentKind::kRxorSweep: return run_transfer(config, angle_scenarios(config, false), both);
    case ExperimentKind::kRotationSweep: return run_transfer(config, angle_scenarios(config, true), both);
    case ExperimentKind::kRxorSampleSweep: return run_transfer(config, sample_sweep_scenarios(config), both);
    case ExperimentKind::kSpirals: return run_transfer(config, spiral_scenarios(config), both);
    case ExperimentKind::kLabelShuffle: return run_transfer(config, label_shuffle_scenarios(config), both);
    case ExperimentKind::kCustomCsv: return run_transfer(config, csv_scenarios(config), both);
    case ExperimentKind::kRecruitment: return run_recruitment(config);
    case ExperimentKind::kScaling: return run_scaling(config);
  }
  throw ConfigError("unhandled experiment kind");
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.learner << ',' << format_double(r.param) << ','
        << (r.repetition < 0 ? std::string("mean") : std::to_string(r.repetition)) << ','
        << r.checkpoint << ',' << r.task_id << ',' << r.n_task << ',' << r.n_seen << ','
        << r.condition << ',' << (r.error ? format_double(*r.error) : std::string("NA")) << ','
        << ratio_cell(r.te) << ',' << ratio_cell(r.fte) << ',' << ratio_cell(r.bte) << ','
        << log_cell(r.te) << ',' << log_cell(r.fte) << ',' << log_cell(r.bte) << ','
        << fixed(r.wall_time_ms, 3) << ',' << r.model_bytes << '\n';
  }
}

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_results_csv(out, rows);
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

void print_summary(std::ostream& out, const ExperimentConfig& config, const ExperimentResult& result) {
  out << "experiment " << to_string(config.kind) << ", " << config.repetitions
      << " repetitions, seed " << config.seed << "\n";
  if (!result.transfers.empty()) {
    std::size_t last_checkpoint = 0;
    for (const auto& s : result.transfers) last_checkpoint = std::max(last_checkpoint, s.checkpoint);
    const bool all_checkpoints = config.kind == ExperimentKind::kRxorSampleSweep;
    out << std::left << std::setw(9) << "param" << std::setw(6) << "model" << std::setw(6) << "task"
        << std::setw(8) << "n_task" << std::setw(9) << "single" << std::setw(9) << "up_to"
        << std::setw(9) << "all" << std::setw(9) << "TE" << std::setw(9) << "FTE" << std::setw(9)
        << "BTE" << "logBTE\n";
    auto cell = [](const Ratio& r) { return r.defined ? fixed(r.value, 4) : std::string("undef"); };
    for (const auto& s : result.transfers) {
      if (!all_checkpoints && s.checkpoint != last_checkpoint) continue;
      const auto& t = s.transfer;
      const auto lb = t.bte.log();
      out << std::left << std::setw(9) << fixed(s.param, 1) << std::setw(6) << s.learner
          << std::setw(6) << t.task_id << std::setw(8) << s.n_task << std::setw(9)
          << fixed(t.single_error, 4) << std::setw(9) << fixed(t.up_to_error, 4) << std::setw(9)
          << fixed(t.all_error, 4) << std::setw(9) << cell(t.te) << std::setw(9) << cell(t.fte)
          << std::setw(9) << cell(t.bte) << (lb ? fixed(*lb, 4) : std::string("undef")) << "\n";
    }
  }
  if (!result.recruitment.empty()) {
    out << std::left << std::setw(10) << "strategy" << std::setw(8) << "n_new" << "error\n";
    for (const auto& r : result.recruitment) {
      out << std::left << std::setw(10) << r.strategy << std::setw(8) << r.n_new
          << fixed(r.error.mean(), 4) << " +- " << fixed(r.error.standard_error(), 4) << "\n";
    }
  }
  if (!result.scaling_points.empty()) {
    out << std::left << std::setw(8) << "n" << std::setw(7) << "tasks" << std::setw(12) << "fit_ms"
        << std::setw(12) << "rep_fit_ms" << std::setw(13) << "model_bytes" << "rep_bytes\n";
    for (const auto& pt : result.scaling_points) {
      out << std::left << std::setw(8) << pt.n << std::setw(7) << pt.tasks << std::setw(12)
          << fixed(pt.fit_ms, 2) << std::setw(12) << fixed(pt.representation_fit_ms, 2)
          << std::setw(13) << pt.model_bytes << pt.representation_bytes << "\n";
    }
  }
  if (result.scaling_fit) {
    const auto& f = *result.scaling_fit;
    out << "log-log exponents vs n: representation time " << fixed(f.representation_time_exponent, 3)
        << ", representation size " << fixed(f.representation_size_exponent, 3)
        << ", full learner time " << fixed(f.time_exponent, 3) << ", full learner size "
        << fixed(f.size_exponent, 3) << "\n";
  }
}

std::filesystem::path run(const ExperimentConfig& config, std::ostream& summary) {
  config.validate();
  const ExperimentResult result = run_experiment(config);
  const std::filesystem::path path(config.output);
  write_results_csv(path, result.rows);
  print_summary(summary, config, result);
  return path;
}

}  // namespace odif
