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

#include "odif/voter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "odif/errors.hpp"

namespace odif {
namespace {

void check_smoothing(double smoothing) {
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) {
    throw ConfigError("smoothing must be a finite non-negative number");
  }
}

// Turns per-leaf class counts into posteriors in place.
void normalize_counts(std::vector<double>& table, std::size_t k, double smoothing) {
  const double uniform = 1.0 / static_cast<double>(k);
  for (std::size_t base = 0; base < table.size(); base += k) {
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) total += table[base + c];
    if (total == 0.0) {
      std::fill_n(table.begin() + static_cast<std::ptrdiff_t>(base), k, uniform);
      continue;
    }
    const double denom = total + smoothing * static_cast<double>(k);
    for (std::size_t c = 0; c < k; ++c) table[base + c] = (table[base + c] + smoothing) / denom;
  }
}

LeafVoter make_voter(const ForestRepresenter& rep, const TaskDataset& data,
                     std::vector<std::size_t> trees) {
  LeafVoter voter;
  voter.target_task_id = data.task_id();
  voter.representer_task_id = rep.source_task_id;
  voter.class_count = data.class_count();
  voter.tables.reserve(trees.size());
  for (std::size_t b : trees) {
    if (b >= rep.trees.size()) throw DataError("voter tree index out of range");
    voter.tables.emplace_back(rep.trees[b].leaf_count() * voter.class_count, 0.0);
  }
  voter.trees = std::move(trees);
  return voter;
}

void check_dimensions(const ForestRepresenter& rep, const TaskDataset& data) {
  if (data.feature_count() != rep.feature_count) {
    throw DataError("task " + std::to_string(data.task_id()) + " has " +
                    std::to_string(data.feature_count()) + " features, representer expects " +
                    std::to_string(rep.feature_count));
  }
}

}  // namespace

std::size_t Posterior::argmax() const {
  return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

bool Posterior::is_valid(double tolerance) const {
  if (probs.empty()) return false;
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tolerance;
}

LeafVoter fit_in_task_voter(const ForestRepresenter& rep, const TaskDataset& data,
                            double smoothing) {
  check_smoothing(smoothing);
  check_dimensions(rep, data);
  if (rep.source_task_id != data.task_id() || rep.n_train != data.size()) {
    throw DataError("in-task voter needs the dataset the representer was fit on (task " +
                    std::to_string(rep.source_task_id) + ")");
  }
  std::vector<std::size_t> all(rep.trees.size());
  std::iota(all.begin(), all.end(), 0);
  LeafVoter voter = make_voter(rep, data, std::move(all));
  const std::size_t k = voter.class_count;
  for (std::size_t b = 0; b < rep.trees.size(); ++b) {
    if (rep.oob_indices[b].empty()) throw DataError("tree " + std::to_string(b) + " has no OOB rows");
    for (std::size_t r : rep.oob_indices[b]) {
      const auto leaf = static_cast<std::size_t>(rep.trees[b].leaf_of(data.row(r)));
      voter.tables[b][leaf * k + data.label(r)] += 1.0;
    }
    normalize_counts(voter.tables[b], k, smoothing);
  }
  return voter;
}

LeafVoter fit_cross_task_voter(const ForestRepresenter& rep, const TaskDataset& data,
                               double smoothing, std::optional<std::vector<std::size_t>> trees) {
  check_smoothing(smoothing);
  check_dimensions(rep, data);
  if (rep.source_task_id == data.task_id()) {
    throw DataError("task " + std::to_string(data.task_id()) +
                    " is the representer's own task; use the out-of-bag voter");
  }
  if (!trees) {
    trees.emplace(rep.trees.size());
    std::iota(trees->begin(), trees->end(), 0);
  }
  LeafVoter voter = make_voter(rep, data, std::move(*trees));
  const std::size_t k = voter.class_count;
  for (std::size_t i = 0; i < voter.trees.size(); ++i) {
    const auto& tree = rep.trees[voter.trees[i]];
    for (std::size_t r = 0; r < data.size(); ++r) {
      const auto leaf = static_cast<std::size_t>(tree.leaf_of(data.row(r)));
      voter.tables[i][leaf * k + data.label(r)] += 1.0;
    }
    normalize_counts(voter.tables[i], k, smoothing);
  }
  return voter;
}

std::size_t accumulate_tree_votes(const LeafVoter& voter, std::span<const std::int32_t> leaf_ids,
                                  std::span<double> sum) {
  const std::size_t k = voter.class_count;
  for (std::size_t i = 0; i < voter.trees.size(); ++i) {
    const std::size_t b = voter.trees[i];
    if (b >= leaf_ids.size()) throw DataError("leaf code is shorter than the voter's trees");
    const std::int32_t leaf = leaf_ids[b];
    if (leaf < 0 || static_cast<std::size_t>(leaf) * k >= voter.tables[i].size()) {
      throw DataError("unknown leaf id " + std::to_string(leaf) + " for tree " + std::to_string(b));
    }
    const auto post = voter.posterior(i, leaf);
    for (std::size_t c = 0; c < k; ++c) sum[c] += post[c];
  }
  return voter.trees.size();
}

Posterior vote(const LeafVoter& voter, std::span<const std::int32_t> leaf_ids) {
  Posterior out{std::vector<double>(voter.class_count, 0.0)};
  const std::size_t n = accumulate_tree_votes(voter, leaf_ids, out.probs);
  if (n == 0) throw DataError("voter has no trees");
  for (double& p : out.probs) p /= static_cast<double>(n);
  return out;
}

std::size_t knn_default_k(std::size_t n) {
  if (n == 0) return 0;
  const double k = std::round(16.0 * std::log2(static_cast<double>(n)));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1.0, k)), 1, n);
}

KnnVoter fit_knn_voter(const ForestRepresenter& rep, const TaskDataset& data, std::size_t k) {
  check_dimensions(rep, data);
  KnnVoter voter;
  voter.target_task_id = data.task_id();
  voter.representer_task_id = rep.source_task_id;
  voter.class_count = data.class_count();
  voter.k = k == 0 ? knn_default_k(data.size()) : std::min(k, data.size());
  voter.points.reserve(data.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    voter.points.push_back(transform(rep, data.row(r)));
    voter.labels.push_back(data.label(r));
  }
  return voter;
}

Posterior knn_vote(const KnnVoter& voter, std::span<const std::int32_t> leaf_ids) {
  if (voter.points.empty() || voter.k == 0) throw DataError("k-NN voter is empty");
  std::vector<std::pair<std::size_t, std::size_t>> dist(voter.points.size());
  for (std::size_t i = 0; i < voter.points.size(); ++i) {
    const auto& p = voter.points[i];
    if (p.size() != leaf_ids.size()) throw DataError("leaf code length mismatch");
    std::size_t mismatches = 0;
    for (std::size_t b = 0; b < p.size(); ++b) mismatches += p[b] != leaf_ids[b];
    dist[i] = {mismatches, i};
  }
  const std::size_t k = std::min(voter.k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  Posterior out{std::vector<double>(voter.class_count, 0.0)};
  for (std::size_t i = 0; i < k; ++i) out.probs[voter.labels[dist[i].second]] += 1.0;
  for (double& p : out.probs) p /= static_cast<double>(k);
  return out;
}

Posterior vote(const Voter& voter, std::span<const std::int32_t> leaf_ids) {
  return std::visit(
      [&](const auto& v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, LeafVoter>) {
          return vote(v, leaf_ids);
        } else {
          return knn_vote(v, leaf_ids);
        }
      },
      voter);
}

}  // namespace odif
