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

#include "odif/environments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "odif/errors.hpp"

namespace odif {
namespace {

void rotate_in_place(std::vector<double>& features, std::size_t p, double angle_degrees) {
  const double a = angle_degrees * std::numbers::pi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  for (std::size_t base = 0; base < features.size(); base += p) {
    const double x = features[base];
    const double y = features[base + 1];
    features[base] = c * x - s * y;
    features[base + 1] = s * x + c * y;
  }
}

}  // namespace

void XorSpec::validate() const {
  if (n < 1) throw ConfigError("xor: n must be >= 1");
  if (!(variance > 0.0) || !std::isfinite(variance)) throw ConfigError("xor: variance must be > 0");
  if (!(angle_degrees >= 0.0 && angle_degrees < 360.0)) {
    throw ConfigError("xor: angle must lie in [0, 360)");
  }
}

void SpiralSpec::validate() const {
  if (classes < 2) throw ConfigError("spirals: need at least 2 classes");
  if (n < 1) throw ConfigError("spirals: n must be >= 1");
  if (!(turns > 0.0) || !std::isfinite(turns)) throw ConfigError("spirals: turns must be > 0");
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw ConfigError("spirals: noise variance must be >= 0");
  }
}

TaskDataset generate_xor(const XorSpec& spec) {
  spec.validate();
  auto rng = spec.seed.engine();
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> noise(0.0, std::sqrt(spec.variance));
  std::vector<double> features(spec.n * 2);
  std::vector<Label> labels(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const Label label = coin(rng) ? 1 : 0;
    const double sign = coin(rng) ? 1.0 : -1.0;
    const double mx = 0.5 * sign;
    const double my = (label == 0 ? 0.5 : -0.5) * sign;
    features[2 * i] = mx + noise(rng);
    features[2 * i + 1] = my + noise(rng);
    labels[i] = label;
  }
  if (spec.angle_degrees != 0.0) rotate_in_place(features, 2, spec.angle_degrees);
  if (spec.label_flip) {
    for (auto& l : labels) l = 1 - l;
  }
  return TaskDataset(std::move(features), 2, std::move(labels), spec.task_id, 2);
}

TaskDataset generate_spirals(const SpiralSpec& spec) {
  spec.validate();
  auto rng = spec.seed.engine();
  const std::size_t k = spec.classes;

  std::uniform_int_distribution<std::size_t> pick_class(0, k - 1);
  std::vector<std::size_t> class_sizes(k, 0);
  for (std::size_t i = 0; i < spec.n; ++i) ++class_sizes[pick_class(rng)];

  std::uniform_real_distribution<double> radius(0.0, 1.0);
  std::normal_distribution<double> angle_noise(0.0, std::sqrt(spec.noise_variance));
  const double band = 4.0 * std::numbers::pi * spec.turns / static_cast<double>(k);

  std::vector<double> features;
  features.reserve(spec.n * 2);
  std::vector<Label> labels;
  labels.reserve(spec.n);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t m = class_sizes[c];
    std::vector<double> r(m);
    for (auto& v : r) v = radius(rng);
    std::sort(r.begin(), r.end());
    const double start = band * static_cast<double>(c);
    for (std::size_t i = 0; i < m; ++i) {
      const double frac = m == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(m - 1);
      double theta = start + band * frac;
      if (spec.noise_variance > 0.0) theta += angle_noise(rng);
      features.push_back(r[i] * std::cos(theta));
      features.push_back(r[i] * std::sin(theta));
      labels.push_back(static_cast<Label>(c));
    }
  }
  // Interleave classes so prefixes of the stream stay class-balanced.
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  TaskDataset grouped(std::move(features), 2, std::move(labels), spec.task_id, k);
  return grouped.select(order);
}

TaskDataset shuffle_labels(const TaskDataset& data, const SeedStream& seed) {
  std::vector<Label> perm(data.class_count());
  std::iota(perm.begin(), perm.end(), 0);
  auto rng = seed.engine();
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Label> labels(data.labels());
  for (auto& l : labels) l = perm[l];
  return data.with_labels(std::move(labels));
}

TaskDataset rotate_features(const TaskDataset& data, double angle_degrees) {
  if (data.feature_count() < 2) throw DataError("rotation needs at least 2 features");
  if (!std::isfinite(angle_degrees)) throw ConfigError("rotation angle must be finite");
  std::vector<double> features(data.features());
  rotate_in_place(features, data.feature_count(), angle_degrees);
  return data.with_features(std::move(features));
}

}  // namespace odif
