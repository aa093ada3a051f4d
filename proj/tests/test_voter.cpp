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

#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "odif/environments.hpp"
#include "odif/errors.hpp"
#include "odif/voter.hpp"
#include "test_util.hpp"

using namespace odif;

namespace {

ForestRepresenter single_leaf_representer(TaskId id, std::size_t n_train, std::size_t p = 1) {
  ForestRepresenter rep;
  rep.source_task_id = id;
  rep.feature_count = p;
  rep.n_train = n_train;
  rep.trees.emplace_back(std::vector<TreeNode>{TreeNode{-1, 0, -1, -1, 0}});
  rep.oob_indices.emplace_back();
  return rep;
}

}  // namespace

TEST_CASE("in-task tables equal brute-force OOB frequencies at alpha = 0") {
  const auto d = testing::random_task(200, 2, 3, 7);
  ForestConfig cfg;
  cfg.n_estimators = 8;
  const auto rep = fit_representer(d, cfg, SeedStream(3));
  const LeafVoter v = fit_in_task_voter(rep, d, 0.0);
  for (std::size_t b = 0; b < rep.tree_count(); ++b) {
    // Independent pass: count OOB labels per leaf, divide.
    std::map<std::int32_t, std::vector<int>> counts;
    for (std::size_t r : rep.oob_indices[b]) {
      auto& c = counts[rep.trees[b].leaf_of(d.row(r))];
      c.resize(3, 0);
      ++c[d.label(r)];
    }
    for (std::int32_t leaf = 0; leaf < static_cast<std::int32_t>(rep.trees[b].leaf_count()); ++leaf) {
      const auto post = v.posterior(b, leaf);
      auto it = counts.find(leaf);
      if (it == counts.end()) {
        for (double q : post) CHECK(q == 1.0 / 3.0);
        continue;
      }
      const int total = std::accumulate(it->second.begin(), it->second.end(), 0);
      for (std::size_t c = 0; c < 3; ++c) CHECK(post[c] == static_cast<double>(it->second[c]) / total);
    }
  }
}

TEST_CASE("laplace smoothing follows (c_k + a) / (c + a K)") {
  const TaskDataset d({0, 0, 0, 0, 0, 0, 0}, 1, {0, 1, 1, 1, 2, 2, 2}, 1, 4);
  const auto rep = single_leaf_representer(0, 3);
  const LeafVoter v = fit_cross_task_voter(rep, d, 1.0);
  const auto post = v.posterior(0, 0);
  CHECK(post[0] == doctest::Approx(2.0 / 11));
  CHECK(post[1] == doctest::Approx(4.0 / 11));
  CHECK(post[2] == doctest::Approx(4.0 / 11));
  CHECK(post[3] == doctest::Approx(1.0 / 11));
}

TEST_CASE("single leaf, class frequencies [10, 30], alpha 0") {
  std::vector<Label> y(40, 1);
  std::fill(y.begin(), y.begin() + 10, 0);
  const TaskDataset d(std::vector<double>(40, 0.0), 1, y, 2, 2);
  const auto v = fit_cross_task_voter(single_leaf_representer(0, 5), d, 0.0);
  CHECK(v.posterior(0, 0)[0] == 0.25);
  CHECK(v.posterior(0, 0)[1] == 0.75);
}

TEST_CASE("leaves no row reaches vote uniformly") {
  ForestRepresenter rep = single_leaf_representer(0, 10);
  rep.trees[0] = DecisionTree({TreeNode{0, 0.5, 1, 2, -1}, TreeNode{-1, 0, -1, -1, 0},
                               TreeNode{-1, 0, -1, -1, 1}});
  const TaskDataset d({0.1, 0.2, 0.3}, 1, {1, 1, 0}, 1, 3);
  const auto v = fit_cross_task_voter(rep, d, 1.0);
  for (double q : v.posterior(0, 1)) CHECK(q == 1.0 / 3.0);
  CHECK(v.posterior(0, 0)[1] == doctest::Approx(3.0 / 6.0));
}

TEST_CASE("cross-task voter refuses the representer's own task") {
  const auto d = testing::random_task(50, 2, 2, 1, 3);
  const auto rep = fit_representer(d, ForestConfig{}, SeedStream(1));
  CHECK_THROWS_AS(fit_cross_task_voter(rep, d, 1.0), DataError);
  CHECK_THROWS_AS(fit_in_task_voter(rep, d.head(40), 1.0), DataError);
  CHECK_THROWS_AS(fit_in_task_voter(rep, d, -1.0), ConfigError);
}

TEST_CASE("vote is the mean of per-tree posteriors") {
  LeafVoter two;
  two.class_count = 2;
  two.trees = {0, 1};
  two.tables = {{1.0, 0.0}, {0.0, 1.0}};
  const std::int32_t leaves[] = {0, 0};
  CHECK(vote(two, leaves).probs == std::vector<double>{0.5, 0.5});

  LeafVoter one;
  one.class_count = 3;
  one.trees = {0};
  one.tables = {{0.2, 0.3, 0.5, 0.6, 0.4, 0.0}};
  const std::int32_t leaf1[] = {1};
  CHECK(vote(one, leaf1).probs == std::vector<double>{0.6, 0.4, 0.0});

  // B = 10 random tables against a brute-force average.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LeafVoter ten;
  ten.class_count = 4;
  std::vector<std::int32_t> ids;
  for (std::size_t b = 0; b < 10; ++b) {
    ten.trees.push_back(b);
    std::vector<double> table(5 * 4);
    for (std::size_t leaf = 0; leaf < 5; ++leaf) {
      double s = 0;
      for (std::size_t c = 0; c < 4; ++c) s += table[leaf * 4 + c] = u(rng);
      for (std::size_t c = 0; c < 4; ++c) table[leaf * 4 + c] /= s;
    }
    ten.tables.push_back(table);
    ids.push_back(static_cast<std::int32_t>(rng() % 5));
  }
  const Posterior p = vote(ten, ids);
  for (std::size_t c = 0; c < 4; ++c) {
    double mean = 0;
    for (std::size_t b = 0; b < 10; ++b) mean += ten.tables[b][static_cast<std::size_t>(ids[b]) * 4 + c];
    CHECK(std::abs(p.probs[c] - mean / 10) <= 1e-12);
  }
  CHECK(p.is_valid());
  const std::int32_t bad[] = {0, 7};
  CHECK_THROWS_AS(vote(two, bad), DataError);
}

TEST_CASE("every vote path returns a normalized posterior") {
  const auto a = testing::random_task(150, 2, 3, 3, 0);
  const auto b = testing::random_task(150, 2, 3, 4, 1);
  const auto rep = fit_representer(a, ForestConfig{}, SeedStream(2));
  const auto in_task = fit_in_task_voter(rep, a, 1.0);
  const auto cross = fit_cross_task_voter(rep, b, 0.0);
  const auto knn = fit_knn_voter(rep, b);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto ids = transform(rep, b.row(i));
    CHECK(vote(in_task, ids).is_valid(1e-9));
    CHECK(vote(cross, ids).is_valid(1e-9));
    CHECK(knn_vote(knn, ids).is_valid(1e-9));
  }
}

TEST_CASE("permuting labels permutes every stored posterior") {
  const auto d = testing::random_task(120, 2, 3, 11, 1);
  const auto src = testing::random_task(120, 2, 2, 12, 0);
  const auto rep = fit_representer(src, ForestConfig{}, SeedStream(1));
  const Label perm[] = {2, 0, 1};
  std::vector<Label> y(d.labels());
  for (auto& l : y) l = perm[l];
  const auto a = fit_cross_task_voter(rep, d, 1.0);
  const auto b = fit_cross_task_voter(rep, d.with_labels(y), 1.0);
  for (std::size_t t = 0; t < a.tables.size(); ++t) {
    for (std::size_t leaf = 0; leaf < a.tables[t].size() / 3; ++leaf) {
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK(b.tables[t][leaf * 3 + perm[c]] == a.tables[t][leaf * 3 + c]);
      }
    }
  }
}

TEST_CASE("XNOR through an XOR forest flips the in-task posteriors") {
  XorSpec spec;
  spec.n = 750;
  spec.seed = SeedStream(21);
  const auto xor_data = generate_xor(spec);
  spec.label_flip = true;
  spec.seed = SeedStream(22);
  spec.task_id = 1;
  const auto xnor_data = generate_xor(spec);
  const auto rep = fit_representer(xor_data, ForestConfig{}, SeedStream(3));
  const auto own = fit_in_task_voter(rep, xor_data, 0.0);
  const auto cross = fit_cross_task_voter(rep, xnor_data, 0.0);
  // Populated leaves: at least three XOR OOB rows and three XNOR rows,
  // with a strict majority in each.
  std::size_t populated = 0, flipped = 0;
  for (std::size_t b = 0; b < rep.tree_count(); ++b) {
    std::vector<int> hit_own(rep.trees[b].leaf_count(), 0), hit_cross(rep.trees[b].leaf_count(), 0);
    for (std::size_t r : rep.oob_indices[b]) ++hit_own[static_cast<std::size_t>(rep.trees[b].leaf_of(xor_data.row(r)))];
    for (std::size_t r = 0; r < xnor_data.size(); ++r) ++hit_cross[static_cast<std::size_t>(rep.trees[b].leaf_of(xnor_data.row(r)))];
    for (std::int32_t leaf = 0; leaf < static_cast<std::int32_t>(hit_own.size()); ++leaf) {
      if (hit_own[static_cast<std::size_t>(leaf)] < 3 || hit_cross[static_cast<std::size_t>(leaf)] < 3) continue;
      const auto p = own.posterior(b, leaf);
      const auto q = cross.posterior(b, leaf);
      if (p[0] == p[1] || q[0] == q[1]) continue;
      ++populated;
      flipped += (p[0] > p[1]) != (q[0] > q[1]);
    }
  }
  REQUIRE(populated > 20);
  CHECK(static_cast<double>(flipped) >= 0.9 * static_cast<double>(populated));
}

TEST_CASE("k-NN default k and clamping") {
  CHECK(knn_default_k(4) == 4);
  CHECK(knn_default_k(1) == 1);
  CHECK(knn_default_k(1000) == static_cast<std::size_t>(std::round(16 * std::log2(1000.0))));
  CHECK(knn_default_k(2) == 2);
}

TEST_CASE("k-NN voter over leaf codes") {
  const auto d = testing::random_task(60, 2, 2, 5, 0);
  const auto rep = fit_representer(d, ForestConfig{}, SeedStream(1));
  // k = 1 and a stored point as the query: its own one-hot label.
  const auto knn1 = fit_knn_voter(rep, d, 1);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto p = knn_vote(knn1, transform(rep, d.row(i)));
    CHECK(p.probs[d.label(i)] == 1.0);
  }
  // n = 4 takes k = 4: global class frequencies.
  const TaskDataset four({0.1, 0.1, 0.2, 0.9, 0.5, 0.5, 0.7, 0.2}, 2, {0, 1, 1, 1}, 1, 2);
  const auto knn4 = fit_knn_voter(rep, four);
  CHECK(knn4.k == 4);
  const double x[] = {0.3, 0.3};
  CHECK(knn_vote(knn4, transform(rep, x)).probs == std::vector<double>{0.25, 0.75});
  KnnVoter empty;
  empty.class_count = 2;
  CHECK_THROWS_AS(knn_vote(empty, transform(rep, x)), DataError);
}

TEST_CASE("k-NN distance ties go to the lower stored index") {
  KnnVoter v;
  v.class_count = 3;
  v.k = 2;
  v.points = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  v.labels = {0, 1, 2, 1};
  // Query (0, 5): distances 1, 2, 1, 2 mismatches -> indices 0 and 2.
  const std::int32_t q[] = {0, 5};
  CHECK(knn_vote(v, q).probs == std::vector<double>{0.5, 0.0, 0.5});
  v.k = 3;
  // Third neighbour: index 1 (distance 2) beats index 3.
  CHECK(knn_vote(v, q).probs[1] == doctest::Approx(1.0 / 3));
}

TEST_CASE("large k on balanced two-class data is near uniform") {
  const auto d = testing::random_task(2000, 2, 2, 31, 1);
  const auto src = testing::random_task(100, 2, 2, 32, 0);
  const auto rep = fit_representer(src, ForestConfig{}, SeedStream(1));
  const auto v = fit_knn_voter(rep, d, 1500);
  const double x[] = {0.5, 0.5};
  const auto p = knn_vote(v, transform(rep, x));
  CHECK(p.probs[0] == doctest::Approx(0.5).epsilon(0.1));
}
