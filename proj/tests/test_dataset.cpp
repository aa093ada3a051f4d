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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "odif/dataset.hpp"
#include "odif/errors.hpp"
#include "odif/seed_stream.hpp"
#include "test_util.hpp"

using namespace odif;

TEST_CASE("seed streams are pure functions of their path") {
  const SeedStream root(42);
  CHECK(root.child("rep", 3) == SeedStream(42).child("rep", 3));
  CHECK(root.child("rep", 3).seed() != root.child("rep", 4).seed());
  CHECK(root.child("rep", 3).seed() != root.child("task", 3).seed());
  CHECK(root.child("a").child("b").seed() != root.child("b").child("a").seed());
  auto e1 = root.child("x").engine();
  auto e2 = root.child("x").engine();
  for (int i = 0; i < 5; ++i) CHECK(e1() == e2());
}

TEST_CASE("task dataset validates its inputs") {
  CHECK_NOTHROW(TaskDataset({0.0, 1.0}, 1, {0, 1}, 0, 2));
  CHECK_THROWS_AS(TaskDataset({0.0, 1.0, 2.0}, 2, {0}, 0, 2), DataError);
  CHECK_THROWS_AS(TaskDataset({0.0, 1.0}, 1, {0, 2}, 0, 2), DataError);
  CHECK_THROWS_AS(TaskDataset({0.0, std::nan("")}, 1, {0, 1}, 0, 2), DataError);
  CHECK_THROWS_AS(TaskDataset({0.0, 1.0}, 0, {0, 1}, 0, 2), DataError);
  CHECK_THROWS_AS(TaskDataset({0.0, 1.0}, 1, {0, 1}, -1, 2), DataError);
}

TEST_CASE("select, head and relabeling keep rows aligned") {
  const TaskDataset d({1, 2, 3, 4, 5, 6}, 2, {0, 1, 0}, 7, 2);
  const std::size_t rows[] = {2, 0, 2};
  const TaskDataset s = d.select(rows);
  CHECK(s.features() == std::vector<double>{5, 6, 1, 2, 5, 6});
  CHECK(s.labels() == std::vector<Label>{0, 0, 0});
  CHECK(s.task_id() == 7);
  CHECK(d.head(2).labels() == std::vector<Label>{0, 1});
  CHECK_THROWS_AS(d.head(4), DataError);
  CHECK(d.with_labels({1, 1, 1}).features() == d.features());
  CHECK(d.with_task_id(3).task_id() == 3);
}

TEST_CASE("task sequences reject repeated task ids") {
  const auto a = testing::random_task(10, 2, 2, 1, 0);
  const auto b = testing::random_task(10, 2, 2, 2, 1);
  CHECK(TaskSequence({a, b}).size() == 2);
  CHECK_THROWS_AS(TaskSequence({a, a}), DataError);
}

TEST_CASE("subsample without replacement partitions the rows") {
  for (std::size_t n : {2u, 3u, 10u, 101u, 750u}) {
    const Subsample s = subsample_indices(n, 0.67, SeedStream(n));
    const auto expected = static_cast<std::size_t>(std::llround(0.67 * static_cast<double>(n)));
    CHECK(s.in_bag.size() == expected);
    CHECK(std::is_sorted(s.in_bag.begin(), s.in_bag.end()));
    CHECK(std::is_sorted(s.out_of_bag.begin(), s.out_of_bag.end()));
    std::vector<std::size_t> all = s.in_bag;
    all.insert(all.end(), s.out_of_bag.begin(), s.out_of_bag.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> iota(n);
    std::iota(iota.begin(), iota.end(), 0);
    CHECK(all == iota);
  }
  CHECK_THROWS_AS(subsample_indices(1, 0.67, SeedStream(1)), DataError);
  CHECK_THROWS_AS(subsample_indices(10, 1.0, SeedStream(1)), ConfigError);
  CHECK(subsample_indices(100, 0.67, SeedStream(1)).in_bag ==
        subsample_indices(100, 0.67, SeedStream(1)).in_bag);
  CHECK(subsample_indices(100, 0.67, SeedStream(1)).in_bag !=
        subsample_indices(100, 0.67, SeedStream(2)).in_bag);
}

TEST_CASE("every row is in-bag about 67% of the time") {
  // Inclusion frequency oracle over many seeds: each row has probability
  // 67/100 of being drawn.
  std::vector<int> hits(100, 0);
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    for (std::size_t r : subsample_indices(100, 0.67, SeedStream(9).child("t", t)).in_bag) ++hits[r];
  }
  const double sd = std::sqrt(trials * 0.67 * 0.33);
  for (int h : hits) CHECK(std::abs(h - trials * 0.67) < 5 * sd);
}

TEST_CASE("bootstrap keeps multiplicities and a non-empty out-of-bag set") {
  const Subsample s = bootstrap_indices(50, 1.0, SeedStream(3));
  CHECK(s.in_bag.size() == 50);
  CHECK(!s.out_of_bag.empty());
  const std::set<std::size_t> drawn(s.in_bag.begin(), s.in_bag.end());
  for (std::size_t r : s.out_of_bag) CHECK(drawn.count(r) == 0);
  CHECK(drawn.size() + s.out_of_bag.size() == 50);
}

TEST_CASE("train/test split is disjoint, ordered and deterministic") {
  const auto d = testing::random_task(200, 3, 2, 5);
  const auto [train, test] = split_train_test(d, 0.45, SeedStream(11));
  CHECK(test.size() == 90);
  CHECK(train.size() == 110);
  // Every original row lands in exactly one side, in original order.
  std::size_t i = 0, j = 0;
  for (std::size_t r = 0; r < d.size(); ++r) {
    const auto row = d.row(r);
    if (i < train.size() && std::equal(row.begin(), row.end(), train.row(i).begin())) {
      ++i;
    } else {
      REQUIRE(j < test.size());
      CHECK(std::equal(row.begin(), row.end(), test.row(j).begin()));
      ++j;
    }
  }
  CHECK(i == train.size());
  CHECK(j == test.size());
  CHECK(split_train_test(d, 0.45, SeedStream(11)).second == test);
  CHECK_THROWS_AS(split_train_test(d, 1.0, SeedStream(1)), ConfigError);
}
