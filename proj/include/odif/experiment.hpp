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

#ifndef ODIF_EXPERIMENT_HPP_
#define ODIF_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "odif/metrics.hpp"
#include "odif/omni_learner.hpp"

namespace odif {

enum class ExperimentKind {
  kXorXnor,
  kRxorSweep,
  kRxorSampleSweep,
  kSpirals,
  kLabelShuffle,
  kRotationSweep,
  kRecruitment,
  kScaling,
  kCustomCsv,
};

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);

// Per-kind parameters. Defaults reproduce the published simulation settings.

struct XorXnorParams {
  std::size_t n_first = 750;
  // Second-task sample sizes at which every condition is measured.
  std::vector<std::size_t> second_sizes = {50, 100, 200, 300, 400, 500, 600, 750};
  std::size_t n_test = 1000;
  double variance = 0.0625;
};

struct AngleSweepParams {
  std::size_t n_per_task = 100;
  std::vector<double> angles = {0, 5, 10, 15, 20, 25, 30, 35, 40, 45,
                                50, 55, 60, 65, 70, 75, 80, 85, 90};
  std::size_t n_test = 1000;
  double variance = 0.0625;
};

struct SampleSweepParams {
  double angle = 25.0;
  // Per-task sample sizes; both tasks get the same size unless n_first is
  // set, in which case only the rotated task grows.
  std::vector<std::size_t> sample_sizes = {100, 200, 400, 800, 1600, 3200};
  std::size_t n_first = 100;
  std::size_t n_test = 1000;
  double variance = 0.0625;
};

struct SpiralTaskParams {
  std::size_t classes = 3;
  double turns = 2.5;
  double noise_variance = 3.0;
};

struct SpiralsParams {
  std::size_t n_first = 750;
  std::vector<std::size_t> second_sizes = {50, 100, 200, 300, 400, 500, 600, 750};
  std::size_t n_test = 1000;
  SpiralTaskParams first{3, 2.5, 3.0};
  SpiralTaskParams second{5, 3.5, 1.876};
};

struct LabelShuffleParams {
  std::size_t n_per_task = 750;
  // Task 0 is XOR; tasks 1.. are XNOR, label-shuffled in the shuffled arm.
  std::size_t n_tasks = 2;
  std::size_t n_test = 1000;
  double variance = 0.0625;
};

struct RecruitmentParams {
  std::size_t n_tasks = 10;
  std::size_t n_prior = 500;
  // Sample sizes of the final task.
  std::vector<std::size_t> new_task_sizes = {50, 100, 200, 500};
  std::size_t n_test = 1000;
  double variance = 0.0625;
  // "rotation": every task is XOR at a random angle; "shuffle": every task is
  // XOR with randomly permuted labels.
  std::string environment = "shuffle";
};

struct ScalingParams {
  std::size_t task_size = 500;
  // Total sample sizes; the task count is total / task_size.
  std::vector<std::size_t> grid = {500, 1000, 2000, 4000, 8000};
  double variance = 0.0625;
};

struct CsvParams {
  std::string path;
  double test_fraction = 0.45;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kXorXnor;
  std::uint64_t seed = 1;
  std::size_t repetitions = 30;
  unsigned threads = 1;
  std::string output = "results.csv";
  LearnerConfig learner;

  XorXnorParams xor_xnor;
  AngleSweepParams rxor_sweep;
  SampleSweepParams rxor_sample_sweep;
  SpiralsParams spirals;
  LabelShuffleParams label_shuffle;
  AngleSweepParams rotation_sweep;
  RecruitmentParams recruitment;
  ScalingParams scaling;
  CsvParams custom_csv;

  /// Throws ConfigError; called before any work starts.
  void validate() const;
};

/// Parses a JSON config. Unknown fields at any level are rejected; absent
/// fields keep their defaults.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// One CSV record. Per-repetition rows carry an error; summary rows
/// (repetition < 0) carry the transfer ratios of the mean errors.
struct ResultRow {
  std::string experiment;
  std::string learner;
  double param = 0.0;
  int repetition = 0;
  std::size_t checkpoint = 0;
  TaskId task_id = 0;
  std::size_t n_task = 0;
  std::size_t n_seen = 0;
  std::string condition;
  std::optional<double> error;
  std::optional<Ratio> te, fte, bte;
  double wall_time_ms = 0.0;
  std::size_t model_bytes = 0;
};

inline constexpr std::string_view kResultHeader =
    "experiment,learner,param,repetition,checkpoint,task_id,n_task,n_seen,condition,error,"
    "te,fte,bte,log_te,log_fte,log_bte,wall_time_ms,model_bytes";

/// Mean-error transfer summary of one task at one checkpoint.
struct TransferSummary {
  std::string learner;
  double param = 0.0;
  std::size_t checkpoint = 0;
  std::size_t n_task = 0;
  std::size_t n_total = 0;
  ErrorEstimate single, up_to, all;
  TaskTransfer transfer;
};

struct RecruitSummary {
  std::string strategy;
  std::size_t n_new = 0;
  ErrorEstimate error;
};

struct ScalingPoint {
  std::size_t n = 0;
  std::size_t tasks = 0;
  double fit_ms = 0.0;                 // median over repetitions
  double representation_fit_ms = 0.0;  // median over repetitions
  std::size_t model_bytes = 0;
  std::size_t representation_bytes = 0;
};

struct ScalingFit {
  double time_exponent = 0.0;
  double size_exponent = 0.0;
  double representation_time_exponent = 0.0;
  double representation_size_exponent = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<TransferSummary> transfers;
  std::vector<RecruitSummary> recruitment;
  std::vector<ScalingPoint> scaling_points;
  std::optional<ScalingFit> scaling_fit;
};

/// Runs any experiment kind in memory. Output is independent of threads.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Runs the experiment, writes the CSV to config.output, prints a summary
/// table to `summary` and returns the output path.
std::filesystem::path run(const ExperimentConfig& config, std::ostream& summary);

/// Scaling benchmark: training wall time and serialized size over a grid
/// of total sample sizes with a proportional number of tasks.
ExperimentResult run_scaling(const ExperimentConfig& config);

/// Least-squares slope of log(y) against log(x). Needs >= 3 points.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
void print_summary(std::ostream& out, const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace odif

#endif  // ODIF_EXPERIMENT_HPP_
