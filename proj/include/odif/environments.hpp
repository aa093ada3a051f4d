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

#ifndef ODIF_ENVIRONMENTS_HPP_
#define ODIF_ENVIRONMENTS_HPP_

#include <cstddef>

#include "odif/dataset.hpp"
#include "odif/seed_stream.hpp"

namespace odif {

/// Gaussian XOR family. Class 0 is a two-component mixture at +-(0.5, 0.5),
/// class 1 at +-(0.5, -0.5), both with covariance variance * I. Points are
/// then rotated counter-clockwise by angle_degrees (R-XOR); label_flip swaps
/// the classes (XNOR).
struct XorSpec {
  std::size_t n = 100;
  double variance = 0.0625;
  double angle_degrees = 0.0;
  bool label_flip = false;
  SeedStream seed;
  TaskId task_id = 0;

  void validate() const;
};

/// K interleaved noisy spirals in the unit disc.
struct SpiralSpec {
  std::size_t classes = 3;
  std::size_t n = 100;
  double turns = 2.5;
  double noise_variance = 3.0;
  SeedStream seed;
  TaskId task_id = 0;

  void validate() const;
};

TaskDataset generate_xor(const XorSpec& spec);

/// Class sizes are multinomial; within a class, radii are uniform on [0, 1]
/// and, taken in increasing order, are paired with evenly spaced angles
/// across the class band [4 pi (k-1) t / K, 4 pi k t / K] plus N(0, sigma^2)
/// angle noise.
TaskDataset generate_spirals(const SpiralSpec& spec);

/// Labels mapped through a uniformly random permutation of the classes.
TaskDataset shuffle_labels(const TaskDataset& data, const SeedStream& seed);

/// Counter-clockwise rotation of the first two coordinates.
TaskDataset rotate_features(const TaskDataset& data, double angle_degrees);

}  // namespace odif

#endif  // ODIF_ENVIRONMENTS_HPP_
