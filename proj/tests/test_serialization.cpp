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

#include <filesystem>
#include <fstream>

#include "odif/environments.hpp"
#include "odif/errors.hpp"
#include "odif/serialization.hpp"
#include "test_util.hpp"

using namespace odif;

namespace {

TaskDataset xor_task(std::size_t n, std::uint64_t seed, TaskId id, bool flip = false) {
  XorSpec s;
  s.n = n;
  s.seed = SeedStream(seed);
  s.task_id = id;
  s.label_flip = flip;
  return generate_xor(s);
}

OmniLearner trained() {
  OmniLearner learner;
  learner.add_task(xor_task(150, 1, 0), SeedStream(1));
  learner.add_task(xor_task(150, 2, 1, true), SeedStream(2));
  learner.add_task(testing::random_task(100, 2, 3, 3, 2), SeedStream(3));
  return learner;
}

std::string error_of(std::string_view text) {
  try {
    deserialize_model(text);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("save, load and predict identically") {
  const OmniLearner learner = trained();
  const auto path = std::filesystem::temp_directory_path() / "odif_roundtrip.model";
  save_model(learner, path);
  const OmniLearner back = load_model(path);
  std::filesystem::remove(path);
  CHECK(back.voters() == learner.voters());
  CHECK(back.tasks() == learner.tasks());
  CHECK(back.config() == learner.config());
  REQUIRE(back.representers().size() == learner.representers().size());
  for (std::size_t r = 0; r < back.representers().size(); ++r) {
    CHECK(*back.representers()[r] == *learner.representers()[r]);
  }
  const auto probe = testing::random_task(1000, 2, 2, 44);
  for (TaskId t = 0; t < 3; ++t) {
    for (std::size_t i = 0; i < probe.size(); ++i) {
      CHECK(back.predict_proba(t, probe.row(i)) == learner.predict_proba(t, probe.row(i)));
    }
  }
  CHECK(serialize_model(back) == serialize_model(learner));
}

TEST_CASE("a reloaded learner keeps learning exactly like the original") {
  OmniLearner a = trained();
  OmniLearner b = deserialize_model(serialize_model(a));
  a.add_task(xor_task(120, 9, 3), SeedStream(4));
  b.add_task(xor_task(120, 9, 3), SeedStream(4));
  CHECK(serialize_model(a) == serialize_model(b));
}

TEST_CASE("non-default configs and recruited rows survive the round trip") {
  LearnerConfig cfg;
  cfg.forest.n_estimators = 4;
  cfg.forest.criterion = SplitCriterion::kEntropy;
  cfg.forest.max_features = 1;
  cfg.smoothing = 0.25;
  cfg.strategy.mode = StrategyMode::kHybrid;
  cfg.strategy.trees_per_task = 4;
  OmniLearner learner(cfg);
  learner.add_task(xor_task(100, 1, 0), SeedStream(1));
  learner.add_task(xor_task(100, 2, 1), SeedStream(2));
  learner.add_task_recruiting(xor_task(100, 3, 2), SeedStream(3));
  const OmniLearner back = deserialize_model(serialize_model(learner));
  CHECK(back.config() == cfg);
  CHECK(back.tasks() == learner.tasks());
  const auto probe = testing::random_task(200, 2, 2, 5);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    CHECK(back.predict_proba(2, probe.row(i)) == learner.predict_proba(2, probe.row(i)));
  }

  LearnerConfig knn;
  knn.voter_kind = VoterKind::kKnn;
  knn.forward_only = true;
  OmniLearner k(knn);
  k.add_task(xor_task(80, 1, 0), SeedStream(1));
  k.add_task(xor_task(80, 2, 1), SeedStream(2));
  const OmniLearner kb = deserialize_model(serialize_model(k));
  CHECK(kb.voters() == k.voters());
  CHECK(kb.config() == knn);
}

TEST_CASE("corruption is detected before anything is built") {
  const std::string text = serialize_model(trained());
  CHECK(error_of(text.substr(0, text.size() - 10)) ==
        "model checksum mismatch: file is truncated or corrupted");
  std::string flipped = text;
  flipped[text.size() / 2] = flipped[text.size() / 2] == '1' ? '2' : '1';
  CHECK(error_of(flipped) == "model checksum mismatch: file is truncated or corrupted");
  CHECK(error_of("") == "model file has no header line");
  CHECK(error_of("PNG 1 0 0\n{}") == "not an odif model file");
}

TEST_CASE("unknown format versions are refused by number") {
  std::string text = serialize_model(trained());
  const auto space = text.find(' ');
  text.replace(space + 1, 1, "2");
  CHECK(error_of(text).rfind("unsupported model format version 2", 0) == 0);
}

TEST_CASE("strict config readers reject unknown fields") {
  CHECK_THROWS_AS(forest_config_from_json(nlohmann::json{{"n_trees", 5}}), ConfigError);
  CHECK_THROWS_AS(forest_config_from_json(nlohmann::json{{"criterion", "mse"}}), ConfigError);
  CHECK_THROWS_AS(forest_config_from_json(nlohmann::json{{"n_estimators", -1}}), ConfigError);
  CHECK_THROWS_AS(learner_config_from_json(nlohmann::json{{"voter", {{"kind", "svm"}}}}), ConfigError);
  CHECK_THROWS_AS(strategy_config_from_json(nlohmann::json{{"mode", "steal"}}), ConfigError);
  const auto c = learner_config_from_json(nlohmann::json{{"forest", {{"n_estimators", 3}}},
                                                         {"voter", {{"smoothing", 0.0}}}});
  CHECK(c.forest.n_estimators == 3);
  CHECK(c.smoothing == 0.0);
  CHECK(c.forest.max_depth == ForestConfig{}.max_depth);
}

TEST_CASE("trees serialize as nested node records") {
  const auto rep = fit_representer(testing::random_task(40, 2, 2, 1), ForestConfig{}, SeedStream(1));
  const auto j = to_json(rep);
  const auto& root = j.at("trees").at(0).at("root");
  CHECK((root.contains("leaf") || root.contains("left")));
  CHECK(representer_from_json(j) == rep);
}
