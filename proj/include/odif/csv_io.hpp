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

#ifndef ODIF_CSV_IO_HPP_
#define ODIF_CSV_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "odif/dataset.hpp"

namespace odif {

// Tabular task files: header `f0,...,f{p-1},label,task`, one row per sample.
// Tasks appear in the sequence in order of first appearance; each task's
// class count is max(2, largest label + 1).

TaskSequence read_task_csv(std::istream& in, const std::string& source_name = "<stream>");
TaskSequence read_task_csv(const std::filesystem::path& path);

void write_task_csv(std::ostream& out, std::span<const TaskDataset> tasks);
void write_task_csv(const std::filesystem::path& path, std::span<const TaskDataset> tasks);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace odif

#endif  // ODIF_CSV_IO_HPP_
