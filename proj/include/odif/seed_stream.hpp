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

#ifndef ODIF_SEED_STREAM_HPP_
#define ODIF_SEED_STREAM_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace odif {

using Rng = std::mt19937_64;

/// A node in a tree of random streams.
///
/// Children are derived purely from (parent seed, label, index), so any
/// consumer that derives its own stream gets the same draws regardless of
/// which thread runs it or in what order siblings are visited.
class SeedStream {
 public:
  constexpr explicit SeedStream(std::uint64_t root = 0) : seed_(root) {}

  SeedStream child(std::string_view label, std::uint64_t index = 0) const;

  /// Fresh engine positioned at the start of this stream.
  Rng engine() const;

  constexpr std::uint64_t seed() const { return seed_; }

  friend constexpr bool operator==(SeedStream, SeedStream) = default;

 private:
  std::uint64_t seed_;
};

}  // namespace odif

#endif  // ODIF_SEED_STREAM_HPP_
