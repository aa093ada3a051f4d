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

#ifndef ODIF_JSON_UTIL_HPP_
#define ODIF_JSON_UTIL_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "odif/errors.hpp"

namespace odif::json_util {

using nlohmann::json;

inline void require_object(const json& j, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
}

inline void reject_unknown(const json& j, std::string_view where,
                           std::initializer_list<std::string_view> allowed) {
  require_object(j, where);
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(std::string(where) + ": unknown field '" + key + "'");
  }
}

inline std::string path(std::string_view where, std::string_view key) {
  return std::string(where) + "." + std::string(key);
}

inline void read(const json& j, std::string_view where, std::string_view key, double& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_number()) throw ConfigError(path(where, key) + ": expected a number");
  out = it->get<double>();
  if (!std::isfinite(out)) throw ConfigError(path(where, key) + ": expected a finite number");
}

template <typename Int>
  requires std::is_integral_v<Int> && (!std::is_same_v<Int, bool>)
inline void read(const json& j, std::string_view where, std::string_view key, Int& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  const bool ok = it->is_number_integer() && (!std::is_unsigned_v<Int> || it->get<std::int64_t>() >= 0 ||
                                               it->is_number_unsigned());
  if (!ok) {
    throw ConfigError(path(where, key) + (std::is_unsigned_v<Int>
                                              ? ": expected a non-negative integer"
                                              : ": expected an integer"));
  }
  out = it->get<Int>();
}

inline void read(const json& j, std::string_view where, std::string_view key, bool& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_boolean()) throw ConfigError(path(where, key) + ": expected true or false");
  out = it->get<bool>();
}

inline void read(const json& j, std::string_view where, std::string_view key, std::string& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_string()) throw ConfigError(path(where, key) + ": expected a string");
  out = it->get<std::string>();
}

template <typename T>
inline void read(const json& j, std::string_view where, std::string_view key, std::vector<T>& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_array()) throw ConfigError(path(where, key) + ": expected an array");
  std::vector<T> values;
  for (std::size_t i = 0; i < it->size(); ++i) {
    json wrapper = json::object();
    wrapper["v"] = (*it)[i];
    T v{};
    read(wrapper, path(where, key) + "[" + std::to_string(i) + "]", "v", v);
    values.push_back(v);
  }
  out = std::move(values);
}

}  // namespace odif::json_util

#endif  // ODIF_JSON_UTIL_HPP_
