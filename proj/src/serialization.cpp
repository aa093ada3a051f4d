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

#include "odif/serialization.hpp"

#include <zlib.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>

#include "odif/errors.hpp"
#include "odif/json_util.hpp"

namespace odif {

using nlohmann::json;
namespace ju = json_util;

namespace {

constexpr std::string_view kMagic = "ODIF-MODEL";

std::string_view criterion_name(SplitCriterion c) {
  return c == SplitCriterion::kGini ? "gini" : "entropy";
}

std::string_view strategy_name(StrategyMode m) {
  switch (m) {
    case StrategyMode::kBuild: return "build";
    case StrategyMode::kRecruit: return "recruit";
    case StrategyMode::kHybrid: return "hybrid";
  }
  return "?";
}

json node_to_json(const std::vector<TreeNode>& nodes, std::int32_t index) {
  const auto& node = nodes[static_cast<std::size_t>(index)];
  if (node.is_leaf()) return json{{"leaf", node.leaf_id}};
  return json{{"feature", node.feature},
              {"threshold", node.threshold},
              {"left", node_to_json(nodes, node.left)},
              {"right", node_to_json(nodes, node.right)}};
}

// Rebuilds nodes in the same pre-order the tree grower emits.
std::int32_t node_from_json(const json& j, std::vector<TreeNode>& nodes, std::size_t depth) {
  if (depth > 10'000) throw FormatError("tree is nested too deeply");
  if (!j.is_object()) throw FormatError("tree node is not an object");
  const auto index = static_cast<std::int32_t>(nodes.size());
  nodes.emplace_back();
  if (j.contains("leaf")) {
    if (j.size() != 1) throw FormatError("leaf node has extra fields");
    nodes.back().leaf_id = j.at("leaf").get<std::int32_t>();
    return index;
  }
  if (j.size() != 4) throw FormatError("internal node needs feature, threshold, left, right");
  TreeNode node;
  node.feature = j.at("feature").get<std::int32_t>();
  node.threshold = j.at("threshold").get<double>();
  if (node.feature < 0) throw FormatError("negative split feature");
  node.left = node_from_json(j.at("left"), nodes, depth + 1);
  node.right = node_from_json(j.at("right"), nodes, depth + 1);
  nodes[static_cast<std::size_t>(index)] = node;
  return index;
}

std::uint32_t crc32_of(std::string_view body) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t offset = 0;
  while (offset < body.size()) {
    const std::size_t chunk = std::min<std::size_t>(body.size() - offset, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(body.data() + offset), static_cast<uInt>(chunk));
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

json to_json(const ForestConfig& c) {
  return json{{"n_estimators", c.n_estimators},       {"max_depth", c.max_depth},
              {"max_samples", c.max_samples},         {"min_samples_leaf", c.min_samples_leaf},
              {"criterion", criterion_name(c.criterion)}, {"max_features", c.max_features},
              {"bootstrap", c.bootstrap}};
}

json to_json(const LearnerConfig& c) {
  return json{{"forest", to_json(c.forest)},
              {"voter",
               {{"kind", c.voter_kind == VoterKind::kLeaf ? "leaf" : "knn"},
                {"smoothing", c.smoothing},
                {"knn_k", c.knn_k}}},
              {"strategy",
               {{"mode", strategy_name(c.strategy.mode)},
                {"trees_per_task", c.strategy.trees_per_task},
                {"recruit_eval_fraction", c.strategy.recruit_eval_fraction},
                {"hybrid_build_fraction", c.strategy.hybrid_build_fraction}}},
              {"forward_only", c.forward_only}};
}

ForestConfig forest_config_from_json(const json& j, ForestConfig c) {
  constexpr std::string_view where = "forest";
  ju::reject_unknown(j, where,
                     {"n_estimators", "max_depth", "max_samples", "min_samples_leaf", "criterion",
                      "max_features", "bootstrap"});
  ju::read(j, where, "n_estimators", c.n_estimators);
  ju::read(j, where, "max_depth", c.max_depth);
  ju::read(j, where, "max_samples", c.max_samples);
  ju::read(j, where, "min_samples_leaf", c.min_samples_leaf);
  ju::read(j, where, "max_features", c.max_features);
  ju::read(j, where, "bootstrap", c.bootstrap);
  std::string criterion(criterion_name(c.criterion));
  ju::read(j, where, "criterion", criterion);
  if (criterion == "gini") {
    c.criterion = SplitCriterion::kGini;
  } else if (criterion == "entropy") {
    c.criterion = SplitCriterion::kEntropy;
  } else {
    throw ConfigError("forest.criterion: expected 'gini' or 'entropy', got '" + criterion + "'");
  }
  c.validate();
  return c;
}

StrategyConfig strategy_config_from_json(const json& j, StrategyConfig c) {
  constexpr std::string_view where = "strategy";
  ju::reject_unknown(j, where,
                     {"mode", "trees_per_task", "recruit_eval_fraction", "hybrid_build_fraction"});
  std::string mode(strategy_name(c.mode));
  ju::read(j, where, "mode", mode);
  if (mode == "build") {
    c.mode = StrategyMode::kBuild;
  } else if (mode == "recruit") {
    c.mode = StrategyMode::kRecruit;
  } else if (mode == "hybrid") {
    c.mode = StrategyMode::kHybrid;
  } else {
    throw ConfigError("strategy.mode: expected build, recruit or hybrid, got '" + mode + "'");
  }
  ju::read(j, where, "trees_per_task", c.trees_per_task);
  ju::read(j, where, "recruit_eval_fraction", c.recruit_eval_fraction);
  ju::read(j, where, "hybrid_build_fraction", c.hybrid_build_fraction);
  c.validate();
  return c;
}

LearnerConfig learner_config_from_json(const json& j, LearnerConfig c) {
  ju::reject_unknown(j, "learner", {"forest", "voter", "strategy", "forward_only"});
  if (j.contains("forest")) c.forest = forest_config_from_json(j.at("forest"), c.forest);
  if (j.contains("strategy")) c.strategy = strategy_config_from_json(j.at("strategy"), c.strategy);
  if (j.contains("voter")) {
    const auto& v = j.at("voter");
    ju::reject_unknown(v, "voter", {"kind", "smoothing", "knn_k"});
    std::string kind = c.voter_kind == VoterKind::kLeaf ? "leaf" : "knn";
    ju::read(v, "voter", "kind", kind);
    if (kind == "leaf") {
      c.voter_kind = VoterKind::kLeaf;
    } else if (kind == "knn") {
      c.voter_kind = VoterKind::kKnn;
    } else {
      throw ConfigError("voter.kind: expected 'leaf' or 'knn', got '" + kind + "'");
    }
    ju::read(v, "voter", "smoothing", c.smoothing);
    ju::read(v, "voter", "knn_k", c.knn_k);
  }
  ju::read(j, "learner", "forward_only", c.forward_only);
  c.validate();
  return c;
}

json to_json(const ForestRepresenter& rep) {
  json trees = json::array();
  for (std::size_t b = 0; b < rep.trees.size(); ++b) {
    trees.push_back({{"root", node_to_json(rep.trees[b].nodes(), 0)},
                     {"oob", rep.oob_indices[b]}});
  }
  return json{{"source_task_id", rep.source_task_id},
              {"feature_count", rep.feature_count},
              {"n_train", rep.n_train},
              {"trees", std::move(trees)}};
}

ForestRepresenter representer_from_json(const json& j) {
  ForestRepresenter rep;
  rep.source_task_id = j.at("source_task_id").get<TaskId>();
  rep.feature_count = j.at("feature_count").get<std::size_t>();
  rep.n_train = j.at("n_train").get<std::size_t>();
  for (const auto& t : j.at("trees")) {
    std::vector<TreeNode> nodes;
    node_from_json(t.at("root"), nodes, 0);
    for (const auto& node : nodes) {
      if (!node.is_leaf() && static_cast<std::size_t>(node.feature) >= rep.feature_count) {
        throw FormatError("split feature out of range");
      }
    }
    rep.trees.emplace_back(std::move(nodes));
    rep.oob_indices.push_back(t.at("oob").get<std::vector<std::size_t>>());
    for (std::size_t r : rep.oob_indices.back()) {
      if (r >= rep.n_train) throw FormatError("out-of-bag index out of range");
    }
  }
  if (rep.trees.empty()) throw FormatError("representer without trees");
  return rep;
}

json to_json(const Voter& voter) {
  if (const auto* leaf = std::get_if<LeafVoter>(&voter)) {
    return json{{"kind", "leaf"},
                {"target_task_id", leaf->target_task_id},
                {"representer_task_id", leaf->representer_task_id},
                {"class_count", leaf->class_count},
                {"trees", leaf->trees},
                {"tables", leaf->tables}};
  }
  const auto& knn = std::get<KnnVoter>(voter);
  return json{{"kind", "knn"},
              {"target_task_id", knn.target_task_id},
              {"representer_task_id", knn.representer_task_id},
              {"class_count", knn.class_count},
              {"k", knn.k},
              {"points", knn.points},
              {"labels", knn.labels}};
}

Voter voter_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "leaf") {
    LeafVoter v;
    v.target_task_id = j.at("target_task_id").get<TaskId>();
    v.representer_task_id = j.at("representer_task_id").get<TaskId>();
    v.class_count = j.at("class_count").get<std::size_t>();
    v.trees = j.at("trees").get<std::vector<std::size_t>>();
    v.tables = j.at("tables").get<std::vector<std::vector<double>>>();
    return v;
  }
  if (kind == "knn") {
    KnnVoter v;
    v.target_task_id = j.at("target_task_id").get<TaskId>();
    v.representer_task_id = j.at("representer_task_id").get<TaskId>();
    v.class_count = j.at("class_count").get<std::size_t>();
    v.k = j.at("k").get<std::size_t>();
    v.points = j.at("points").get<std::vector<LeafIds>>();
    v.labels = j.at("labels").get<std::vector<Label>>();
    if (v.points.size() != v.labels.size() || v.k == 0 || v.k > v.points.size()) {
      throw FormatError("inconsistent k-NN voter");
    }
    for (Label l : v.labels) {
      if (l >= v.class_count) throw FormatError("k-NN label out of range");
    }
    return v;
  }
  throw FormatError("unknown voter kind '" + kind + "'");
}

json to_json(const TaskDataset& data) {
  return json{{"feature_count", data.feature_count()},
              {"features", data.features()},
              {"labels", data.labels()}};
}

TaskDataset dataset_from_json(const json& j, TaskId task_id, std::size_t class_count) {
  return TaskDataset(j.at("features").get<std::vector<double>>(),
                     j.at("feature_count").get<std::size_t>(),
                     j.at("labels").get<std::vector<Label>>(), task_id, class_count);
}

std::string canonical_bytes(const ForestRepresenter& rep) { return to_json(rep).dump(); }
std::string canonical_bytes(const Voter& voter) { return to_json(voter).dump(); }

std::string serialize_model(const OmniLearner& learner) {
  json tasks = json::array();
  for (const auto& t : learner.tasks()) {
    tasks.push_back({{"task_id", t.task_id},
                     {"class_count", t.class_count},
                     {"tree_weighted", t.tree_weighted},
                     {"data", t.data ? to_json(*t.data) : json(nullptr)}});
  }
  json reps = json::array();
  for (const auto& r : learner.representers()) reps.push_back(to_json(*r));
  json voters = json::array();
  for (const auto& [key, v] : learner.voters()) voters.push_back(to_json(v));

  const json body{{"format_version", kModelFormatVersion},
                  {"config", to_json(learner.config())},
                  {"feature_count", learner.feature_count()},
                  {"tasks", std::move(tasks)},
                  {"representers", std::move(reps)},
                  {"voters", std::move(voters)}};
  const std::string text = body.dump();
  char crc[16];
  std::snprintf(crc, sizeof crc, "%08x", crc32_of(text));
  std::string out;
  out.reserve(text.size() + 64);
  out.append(kMagic).append(" ").append(std::to_string(kModelFormatVersion)).append(" ");
  out.append(crc).append(" ").append(std::to_string(text.size())).append("\n");
  out.append(text);
  return out;
}

OmniLearner deserialize_model(std::string_view text) {
  const std::size_t newline = text.find('\n');
  if (newline == std::string_view::npos) throw FormatError("model file has no header line");
  std::istringstream header{std::string(text.substr(0, newline))};
  std::string magic, crc_hex;
  long long version = 0;
  std::size_t length = 0;
  if (!(header >> magic) || magic != kMagic) throw FormatError("not an odif model file");
  if (!(header >> version)) throw FormatError("model header has no format version");
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version) +
                      " (this build reads version " + std::to_string(kModelFormatVersion) + ")");
  }
  if (!(header >> crc_hex >> length)) throw FormatError("model header is incomplete");
  const std::string_view body = text.substr(newline + 1);
  std::uint32_t expected = 0;
  auto [ptr, ec] = std::from_chars(crc_hex.data(), crc_hex.data() + crc_hex.size(), expected, 16);
  if (ec != std::errc{} || ptr != crc_hex.data() + crc_hex.size()) {
    throw FormatError("model header has a malformed checksum");
  }
  if (body.size() != length || crc32_of(body) != expected) {
    throw FormatError("model checksum mismatch: file is truncated or corrupted");
  }

  try {
    const json j = json::parse(body);
    if (j.at("format_version").get<int>() != kModelFormatVersion) {
      throw FormatError("unsupported model format version in body");
    }
    LearnerConfig config = learner_config_from_json(j.at("config"));
    std::vector<OmniLearner::TaskRecord> tasks;
    for (const auto& t : j.at("tasks")) {
      OmniLearner::TaskRecord rec;
      rec.task_id = t.at("task_id").get<TaskId>();
      rec.class_count = t.at("class_count").get<std::size_t>();
      rec.tree_weighted = t.at("tree_weighted").get<bool>();
      if (!t.at("data").is_null()) rec.data = dataset_from_json(t.at("data"), rec.task_id, rec.class_count);
      tasks.push_back(std::move(rec));
    }
    std::vector<std::shared_ptr<const ForestRepresenter>> reps;
    for (const auto& r : j.at("representers")) {
      reps.push_back(std::make_shared<const ForestRepresenter>(representer_from_json(r)));
    }
    std::map<OmniLearner::VoterKey, Voter> voters;
    for (const auto& v : j.at("voters")) {
      Voter voter = voter_from_json(v);
      const auto key = std::visit(
          [](const auto& x) { return OmniLearner::VoterKey{x.target_task_id, x.representer_task_id}; },
          voter);
      if (!voters.emplace(key, std::move(voter)).second) throw FormatError("duplicate voter");
    }
    OmniLearner learner = OmniLearner::from_parts(std::move(config), std::move(tasks),
                                                  std::move(reps), std::move(voters));
    if (learner.feature_count() != j.at("feature_count").get<std::size_t>()) {
      throw FormatError("feature count does not match the model contents");
    }
    return learner;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("malformed model body: ") + e.what());
  }
}

void save_model(const OmniLearner& learner, const std::filesystem::path& path) {
  const std::string text = serialize_model(learner);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

OmniLearner load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(text);
}

}  // namespace odif
