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

#include "odif/forest.hpp"

#include <string>

#include "odif/errors.hpp"
#include "odif/parallel.hpp"

namespace odif {

std::size_t ForestRepresenter::representation_size() const {
  std::size_t total = 0;
  for (const auto& t : trees) total += t.leaf_count();
  return total;
}

ForestRepresenter fit_representer(const TaskDataset& data, const ForestConfig& config,
                                  const SeedStream& seed, unsigned threads) {
  config.validate();
  if (data.size() < 2 * config.min_samples_leaf) {
    throw DataError("task " + std::to_string(data.task_id()) + " has " +
                    std::to_string(data.size()) + " rows, fewer than 2 * min_samples_leaf");
  }
  ForestRepresenter rep;
  rep.source_task_id = data.task_id();
  rep.feature_count = data.feature_count();
  rep.n_train = data.size();
  rep.trees.resize(config.n_estimators);
  rep.oob_indices.resize(config.n_estimators);
  parallel_for(config.n_estimators, threads, [&](std::size_t b) {
    const SeedStream tree_seed = seed.child("tree", b);
    Subsample sample = config.bootstrap
                           ? bootstrap_indices(data.size(), config.max_samples, tree_seed.child("bag"))
                           : subsample_indices(data.size(), config.max_samples, tree_seed.child("bag"));
    rep.trees[b] = grow_tree(data, sample.in_bag, config, tree_seed.child("grow"));
    rep.oob_indices[b] = std::move(sample.out_of_bag);
  });
  return rep;
}

LeafIds transform(const ForestRepresenter& rep, std::span<const double> x) {
  if (x.size() != rep.feature_count) {
    throw DataError("input has " + std::to_string(x.size()) + " features, representer expects " +
                    std::to_string(rep.feature_count));
  }
  LeafIds ids(rep.trees.size());
  for (std::size_t b = 0; b < rep.trees.size(); ++b) ids[b] = rep.trees[b].leaf_of(x);
  return ids;
}

}  // namespace odif
