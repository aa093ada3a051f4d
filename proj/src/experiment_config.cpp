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

#include <fstream>
#include <string>

#include "odif/errors.hpp"
#include "odif/experiment.hpp"
#include "odif/json_util.hpp"
#include "odif/serialization.hpp"

namespace odif {

using nlohmann::json;
namespace ju = json_util;

namespace {

constexpr ExperimentKind kAllKinds[] = {
    ExperimentKind::kXorXnor,      ExperimentKind::kRxorSweep,     ExperimentKind::kRxorSampleSweep,
    ExperimentKind::kSpirals,      ExperimentKind::kLabelShuffle,  ExperimentKind::kRotationSweep,
    ExperimentKind::kRecruitment,  ExperimentKind::kScaling,       ExperimentKind::kCustomCsv,
};

void parse_section(const json& j, XorXnorParams& p) {
  constexpr std::string_view w = "xor_xnor";
  ju::reject_unknown(j, w, {"n_first", "second_sizes", "n_test", "variance"});
  ju::read(j, w, "n_first", p.n_first);
  ju::read(j, w, "second_sizes", p.second_sizes);
  ju::read(j, w, "n_test", p.n_test);
  ju::read(j, w, "variance", p.variance);
}

void parse_section(const json& j, std::string_view w, AngleSweepParams& p) {
  ju::reject_unknown(j, w, {"n_per_task", "angles", "n_test", "variance"});
  ju::read(j, w, "n_per_task", p.n_per_task);
  ju::read(j, w, "angles", p.angles);
  ju::read(j, w, "n_test", p.n_test);
  ju::read(j, w, "variance", p.variance);
}

void parse_section(const json& j, SampleSweepParams& p) {
  constexpr std::string_view w = "rxor_sample_sweep";
  ju::reject_unknown(j, w, {"angle", "sample_sizes", "n_first", "n_test", "variance"});
  ju::read(j, w, "angle", p.angle);
  ju::read(j, w, "n_first", p.n_first);
  ju::read(j, w, "sample_sizes", p.sample_sizes);
  ju::read(j, w, "n_test", p.n_test);
  ju::read(j, w, "variance", p.variance);
}

void parse_spiral_task(const json& j, std::string_view w, SpiralTaskParams& p) {
  ju::reject_unknown(j, w, {"classes", "turns", "noise_variance"});
  ju::read(j, w, "classes", p.classes);
  ju::read(j, w, "turns", p.turns);
  ju::read(j, w, "noise_variance", p.noise_variance);
}

void parse_section(const json& j, SpiralsParams& p) {
  constexpr std::string_view w = "spirals";
  ju::reject_unknown(j, w, {"n_first", "second_sizes", "n_test", "first", "second"});
  ju::read(j, w, "n_first", p.n_first);
  ju::read(j, w, "second_sizes", p.second_sizes);
  ju::read(j, w, "n_test", p.n_test);
  if (j.contains("first")) parse_spiral_task(j.at("first"), "spirals.first", p.first);
  if (j.contains("second")) parse_spiral_task(j.at("second"), "spirals.second", p.second);
}

void parse_section(const json& j, LabelShuffleParams& p) {
  constexpr std::string_view w = "label_shuffle";
  ju::reject_unknown(j, w, {"n_per_task", "n_tasks", "n_test", "variance"});
  ju::read(j, w, "n_per_task", p.n_per_task);
  ju::read(j, w, "n_tasks", p.n_tasks);
  ju::read(j, w, "n_test", p.n_test);
  ju::read(j, w, "variance", p.variance);
}

void parse_section(const json& j, RecruitmentParams& p) {
  constexpr std::string_view w = "recruitment";
  ju::reject_unknown(j, w, {"n_tasks", "n_prior", "new_task_sizes", "n_test", "variance", "environment"});
  ju::read(j, w, "n_tasks", p.n_tasks);
  ju::read(j, w, "n_prior", p.n_prior);
  ju::read(j, w, "new_task_sizes", p.new_task_sizes);
  ju::read(j, w, "n_test", p.n_test);
  ju::read(j, w, "variance", p.variance);
  ju::read(j, w, "environment", p.environment);
}

void parse_section(const json& j, ScalingParams& p) {
  constexpr std::string_view w = "scaling";
  ju::reject_unknown(j, w, {"task_size", "grid", "variance"});
  ju::read(j, w, "task_size", p.task_size);
  ju::read(j, w, "grid", p.grid);
  ju::read(j, w, "variance", p.variance);
}

void parse_section(const json& j, CsvParams& p) {
  constexpr std::string_view w = "custom_csv";
  ju::reject_unknown(j, w, {"path", "test_fraction"});
  ju::read(j, w, "path", p.path);
  ju::read(j, w, "test_fraction", p.test_fraction);
}

void check_sizes(const std::vector<std::size_t>& sizes, std::string_view where) {
  if (sizes.empty()) throw ConfigError(std::string(where) + ": needs at least one sample size");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 2) throw ConfigError(std::string(where) + ": sample sizes must be >= 2");
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw ConfigError(std::string(where) + ": sample sizes must be strictly increasing");
    }
  }
}

void check_count(std::size_t n, std::size_t minimum, std::string_view where) {
  if (n < minimum) {
    throw ConfigError(std::string(where) + " must be >= " + std::to_string(minimum));
  }
}

void check_variance(double v, std::string_view where) {
  if (!(v > 0.0)) throw ConfigError(std::string(where) + ": variance must be > 0");
}

void check_angles(const std::vector<double>& angles, std::string_view where) {
  if (angles.empty()) throw ConfigError(std::string(where) + ": needs at least one angle");
  for (double a : angles) {
    if (!(a >= 0.0 && a < 360.0)) throw ConfigError(std::string(where) + ": angles must lie in [0, 360)");
  }
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kXorXnor: return "xor_xnor";
    case ExperimentKind::kRxorSweep: return "rxor_sweep";
    case ExperimentKind::kRxorSampleSweep: return "rxor_sample_sweep";
    case ExperimentKind::kSpirals: return "spirals";
    case ExperimentKind::kLabelShuffle: return "label_shuffle";
    case ExperimentKind::kRotationSweep: return "rotation_sweep";
    case ExperimentKind::kRecruitment: return "recruitment";
    case ExperimentKind::kScaling: return "scaling";
    case ExperimentKind::kCustomCsv: return "custom_csv";
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  for (auto k : kAllKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (output.empty()) throw ConfigError("output path must not be empty");
  learner.validate();
  switch (kind) {
    case ExperimentKind::kXorXnor:
      check_count(xor_xnor.n_first, 2, "xor_xnor.n_first");
      check_sizes(xor_xnor.second_sizes, "xor_xnor.second_sizes");
      check_count(xor_xnor.n_test, 1, "xor_xnor.n_test");
      check_variance(xor_xnor.variance, "xor_xnor");
      break;
    case ExperimentKind::kRxorSweep:
    case ExperimentKind::kRotationSweep: {
      const auto& p = kind == ExperimentKind::kRxorSweep ? rxor_sweep : rotation_sweep;
      const auto where = to_string(kind);
      check_count(p.n_per_task, 2, std::string(where) + ".n_per_task");
      check_angles(p.angles, where);
      check_count(p.n_test, 1, std::string(where) + ".n_test");
      check_variance(p.variance, where);
      break;
    }
    case ExperimentKind::kRxorSampleSweep:
      check_angles({rxor_sample_sweep.angle}, "rxor_sample_sweep");
      check_sizes(rxor_sample_sweep.sample_sizes, "rxor_sample_sweep.sample_sizes");
      check_count(rxor_sample_sweep.n_test, 1, "rxor_sample_sweep.n_test");
      check_variance(rxor_sample_sweep.variance, "rxor_sample_sweep");
      break;
    case ExperimentKind::kSpirals:
      check_count(spirals.n_first, 2, "spirals.n_first");
      check_sizes(spirals.second_sizes, "spirals.second_sizes");
      check_count(spirals.n_test, 1, "spirals.n_test");
      for (const auto* t : {&spirals.first, &spirals.second}) {
        check_count(t->classes, 2, "spirals classes");
        if (!(t->turns > 0.0)) throw ConfigError("spirals: turns must be > 0");
        if (!(t->noise_variance >= 0.0)) throw ConfigError("spirals: noise_variance must be >= 0");
      }
      break;
    case ExperimentKind::kLabelShuffle:
      check_count(label_shuffle.n_per_task, 2, "label_shuffle.n_per_task");
      check_count(label_shuffle.n_tasks, 2, "label_shuffle.n_tasks");
      check_count(label_shuffle.n_test, 1, "label_shuffle.n_test");
      check_variance(label_shuffle.variance, "label_shuffle");
      break;
    case ExperimentKind::kRecruitment: {
      check_count(recruitment.n_tasks, 2, "recruitment.n_tasks");
      check_count(recruitment.n_prior, 2, "recruitment.n_prior");
      check_sizes(recruitment.new_task_sizes, "recruitment.new_task_sizes");
      check_count(recruitment.n_test, 1, "recruitment.n_test");
      check_variance(recruitment.variance, "recruitment");
      if (recruitment.environment != "rotation" && recruitment.environment != "shuffle") {
        throw ConfigError("recruitment.environment: expected 'rotation' or 'shuffle'");
      }
      const auto& s = learner.strategy;
      for (std::size_t n : recruitment.new_task_sizes) {
        if (static_cast<double>(n) * s.recruit_eval_fraction < 1.0 ||
            static_cast<double>(n) * (1.0 - s.recruit_eval_fraction) < 1.0) {
          throw ConfigError("recruitment: new task size " + std::to_string(n) +
                            " is too small for recruit_eval_fraction");
        }
      }
      break;
    }
    case ExperimentKind::kScaling: {
      check_count(scaling.task_size, 2, "scaling.task_size");
      check_sizes(scaling.grid, "scaling.grid");
      if (scaling.grid.size() < 3) {
        throw ConfigError("scaling.grid: need at least 3 points to fit a slope");
      }
      for (std::size_t n : scaling.grid) {
        if (n % scaling.task_size != 0) {
          throw ConfigError("scaling.grid: every total must be a multiple of task_size");
        }
      }
      check_variance(scaling.variance, "scaling");
      break;
    }
    case ExperimentKind::kCustomCsv:
      if (custom_csv.path.empty()) throw ConfigError("custom_csv.path is required");
      if (!(custom_csv.test_fraction > 0.0 && custom_csv.test_fraction < 1.0)) {
        throw ConfigError("custom_csv.test_fraction must lie in (0, 1)");
      }
      break;
  }
}

ExperimentConfig parse_experiment_config(const json& j) {
  ju::reject_unknown(j, "config",
                     {"experiment", "seed", "repetitions", "threads", "output", "forest", "voter",
                      "strategy", "forward_only", "xor_xnor", "rxor_sweep", "rxor_sample_sweep",
                      "spirals", "label_shuffle", "rotation_sweep", "recruitment", "scaling",
                      "custom_csv"});
  ExperimentConfig c;
  std::string kind;
  if (!j.contains("experiment")) throw ConfigError("config: missing field 'experiment'");
  ju::read(j, "config", "experiment", kind);
  auto parsed = parse_experiment_kind(kind);
  if (!parsed) throw ConfigError("config.experiment: unknown experiment '" + kind + "'");
  c.kind = *parsed;
  ju::read(j, "config", "seed", c.seed);
  ju::read(j, "config", "repetitions", c.repetitions);
  ju::read(j, "config", "threads", c.threads);
  ju::read(j, "config", "output", c.output);

  json learner = json::object();
  for (const char* key : {"forest", "voter", "strategy", "forward_only"}) {
    if (j.contains(key)) learner[key] = j.at(key);
  }
  c.learner = learner_config_from_json(learner);

  if (j.contains("xor_xnor")) parse_section(j.at("xor_xnor"), c.xor_xnor);
  if (j.contains("rxor_sweep")) parse_section(j.at("rxor_sweep"), "rxor_sweep", c.rxor_sweep);
  if (j.contains("rxor_sample_sweep")) parse_section(j.at("rxor_sample_sweep"), c.rxor_sample_sweep);
  if (j.contains("spirals")) parse_section(j.at("spirals"), c.spirals);
  if (j.contains("label_shuffle")) parse_section(j.at("label_shuffle"), c.label_shuffle);
  if (j.contains("rotation_sweep")) {
    parse_section(j.at("rotation_sweep"), "rotation_sweep", c.rotation_sweep);
  }
  if (j.contains("recruitment")) parse_section(j.at("recruitment"), c.recruitment);
  if (j.contains("scaling")) parse_section(j.at("scaling"), c.scaling);
  if (j.contains("custom_csv")) parse_section(j.at("custom_csv"), c.custom_csv);
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_experiment_config(j);
}

}  // namespace odif
