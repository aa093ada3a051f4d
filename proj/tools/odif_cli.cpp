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

// Command-line front end: data generation, experiments, and model files.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "odif/csv_io.hpp"
#include "odif/environments.hpp"
#include "odif/errors.hpp"
#include "odif/experiment.hpp"
#include "odif/json_util.hpp"
#include "odif/metrics.hpp"
#include "odif/serialization.hpp"

namespace {

using nlohmann::json;
namespace ju = odif::json_util;

constexpr int kRuntimeError = 1;
constexpr int kConfigError = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> threads;
  std::optional<std::size_t> reps;
  std::string input;
  std::string data;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw odif::ConfigError("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw odif::ConfigError(path + ": " + e.what());
  }
}

odif::ExperimentConfig experiment_config(const Options& o, std::optional<odif::ExperimentKind> force) {
  odif::ExperimentConfig config;
  if (!o.config.empty()) {
    config = odif::load_experiment_config(o.config);
  } else if (!force) {
    throw odif::ConfigError("run: --config is required");
  }
  if (force) config.kind = *force;
  if (o.seed) config.seed = *o.seed;
  if (o.threads) config.threads = *o.threads;
  if (o.reps) config.repetitions = *o.reps;
  if (!o.out.empty()) config.output = o.out;
  config.validate();
  return config;
}

int cmd_run(const Options& o, std::optional<odif::ExperimentKind> force) {
  const auto config = experiment_config(o, force);
  const auto path = odif::run(config, std::cout);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

// generate: {"tasks": [{"environment": "xor", "n": 750, "angle": 0, "flip": false,
// "variance": 0.0625}, {"environment": "spirals", "classes": 3, ...}]}
std::vector<odif::TaskDataset> generate_tasks(const json& j, const odif::SeedStream& root) {
  ju::reject_unknown(j, "generate", {"tasks"});
  if (!j.contains("tasks") || !j.at("tasks").is_array() || j.at("tasks").empty()) {
    throw odif::ConfigError("generate: 'tasks' must be a non-empty array");
  }
  std::vector<odif::TaskDataset> tasks;
  for (std::size_t i = 0; i < j.at("tasks").size(); ++i) {
    const json& t = j.at("tasks")[i];
    const std::string where = "generate.tasks[" + std::to_string(i) + "]";
    std::string env = "xor";
    ju::require_object(t, where);
    ju::read(t, where, "environment", env);
    const auto id = static_cast<odif::TaskId>(i);
    if (env == "xor") {
      ju::reject_unknown(t, where, {"environment", "n", "angle", "flip", "variance"});
      odif::XorSpec spec;
      ju::read(t, where, "n", spec.n);
      ju::read(t, where, "angle", spec.angle_degrees);
      ju::read(t, where, "flip", spec.label_flip);
      ju::read(t, where, "variance", spec.variance);
      spec.seed = root.child("data", i);
      spec.task_id = id;
      spec.validate();
      tasks.push_back(odif::generate_xor(spec));
    } else if (env == "spirals") {
      ju::reject_unknown(t, where, {"environment", "n", "classes", "turns", "noise_variance"});
      odif::SpiralSpec spec;
      ju::read(t, where, "n", spec.n);
      ju::read(t, where, "classes", spec.classes);
      ju::read(t, where, "turns", spec.turns);
      ju::read(t, where, "noise_variance", spec.noise_variance);
      spec.seed = root.child("data", i);
      spec.task_id = id;
      spec.validate();
      tasks.push_back(odif::generate_spirals(spec));
    } else {
      throw odif::ConfigError(where + ".environment: expected \"xor\" or \"spirals\", got \"" + env + "\"");
    }
  }
  return tasks;
}

int cmd_generate(const Options& o) {
  json spec = json::parse(R"({"tasks": [{"environment": "xor", "n": 750},
                                        {"environment": "xor", "n": 750, "flip": true}]})");
  if (!o.config.empty()) spec = read_json_file(o.config);
  const auto tasks = generate_tasks(spec, odif::SeedStream(o.seed.value_or(1)));
  if (o.out.empty()) {
    odif::write_task_csv(std::cout, tasks);
  } else {
    odif::write_task_csv(std::filesystem::path(o.out), tasks);
    std::cerr << "wrote " << tasks.size() << " tasks to " << o.out << "\n";
  }
  return 0;
}

void describe(std::ostream& out, const odif::TaskSequence& seq) {
  out << "task,rows,features,classes\n";
  for (const auto& t : seq.train()) {
    out << t.task_id() << ',' << t.size() << ',' << t.feature_count() << ',' << t.class_count() << "\n";
  }
}

int cmd_ingest(const Options& o) {
  const auto seq = odif::read_task_csv(std::filesystem::path(o.input));
  describe(std::cout, seq);
  return 0;
}

int cmd_save(const Options& o) {
  if (o.out.empty()) throw odif::ConfigError("save: --out is required");
  odif::LearnerConfig config;
  if (!o.config.empty()) config = odif::learner_config_from_json(read_json_file(o.config));
  if (o.threads) config.threads = *o.threads;
  config.validate();
  const auto seq = odif::read_task_csv(std::filesystem::path(o.input));
  const odif::SeedStream root(o.seed.value_or(1));
  odif::OmniLearner learner(config);
  for (const auto& task : seq.train()) {
    const auto seed = root.child("task", static_cast<std::uint64_t>(task.task_id()));
    if (config.strategy.mode != odif::StrategyMode::kBuild && !learner.tasks().empty()) {
      learner.add_task_recruiting(task, seed);
    } else {
      learner.add_task(task, seed);
    }
  }
  odif::save_model(learner, o.out);
  std::cout << "saved " << learner.tasks().size() << " tasks, " << learner.representers().size()
            << " representers, " << learner.voters().size() << " voters to " << o.out << "\n";
  return 0;
}

int cmd_load(const Options& o) {
  const auto learner = odif::load_model(o.input);
  std::cout << "model " << o.input << ": " << learner.tasks().size() << " tasks, "
            << learner.representers().size() << " representers, " << learner.voters().size()
            << " voters, " << learner.feature_count() << " features\n";
  if (o.data.empty()) return 0;
  const auto seq = odif::read_task_csv(std::filesystem::path(o.data));
  std::cout << "task,rows,error\n";
  for (const auto& t : seq.train()) {
    if (!learner.has_task(t.task_id())) {
      throw odif::DataError(o.data + ": task " + std::to_string(t.task_id()) + " is not in the model");
    }
    std::cout << t.task_id() << ',' << t.size() << ',' << odif::format_double(odif::zero_one_error(learner, t))
              << "\n";
  }
  if (!o.out.empty()) {
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + o.out + " for writing");
    out << "task,row,prediction\n";
    for (const auto& t : seq.train()) {
      for (std::size_t i = 0; i < t.size(); ++i) {
        out << t.task_id() << ',' << i << ',' << learner.predict(t.task_id(), t.row(i)) << "\n";
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Omnidirectional forests: lifelong learning experiments"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "JSON configuration file");
    cmd->add_option("--seed", o.seed, "Root random seed");
    cmd->add_option("--out", o.out, "Output path");
  };
  auto add_exec = [&](CLI::App* cmd) {
    cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--reps", o.reps, "Repetitions (overrides the config)")->check(CLI::PositiveNumber);
  };

  auto* generate = app.add_subcommand("generate", "Write synthetic tasks as CSV");
  add_common(generate);
  auto* run = app.add_subcommand("run", "Run an experiment and write result CSV");
  add_common(run);
  add_exec(run);
  auto* scaling = app.add_subcommand("scaling", "Run the training-time and model-size benchmark");
  add_common(scaling);
  add_exec(scaling);
  auto* save = app.add_subcommand("save", "Train on a task CSV and save the model");
  add_common(save);
  save->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  save->add_option("data", o.input, "Task CSV")->required();
  auto* load = app.add_subcommand("load", "Load a model; optionally score a task CSV");
  load->add_option("model", o.input, "Model file")->required();
  load->add_option("--data", o.data, "Task CSV to score");
  load->add_option("--out", o.out, "Write per-row predictions here");
  auto* ingest = app.add_subcommand("ingest", "Validate a task CSV and summarize it");
  ingest->add_option("data", o.input, "Task CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*generate) return cmd_generate(o);
    if (*run) return cmd_run(o, std::nullopt);
    if (*scaling) return cmd_run(o, odif::ExperimentKind::kScaling);
    if (*save) return cmd_save(o);
    if (*load) return cmd_load(o);
    if (*ingest) return cmd_ingest(o);
  } catch (const odif::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
