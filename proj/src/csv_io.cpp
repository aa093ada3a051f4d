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

#include "odif/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>
#include <vector>

#include "odif/errors.hpp"

namespace odif {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void fail(const std::string& source, std::size_t line_no, const std::string& what) {
  throw DataError(source + ":" + std::to_string(line_no) + ": " + what);
}

struct PendingTask {
  std::vector<double> features;
  std::vector<Label> labels;
  Label max_label = 0;
};

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

TaskSequence read_task_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file, expected a header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);

  std::size_t p = 0;
  while (p < header.size() && header[p] == "f" + std::to_string(p)) ++p;
  if (p == 0) fail(source, 1, "missing feature column 'f0'");
  if (p >= header.size() || header[p] != "label") fail(source, 1, "missing column 'label'");
  if (p + 1 >= header.size() || header[p + 1] != "task") fail(source, 1, "missing column 'task'");
  if (header.size() != p + 2) {
    fail(source, 1, "unexpected column '" + std::string(header[p + 2]) + "'");
  }

  std::map<TaskId, PendingTask> tasks;
  std::vector<TaskId> order;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != p + 2) {
      fail(source, line_no,
           "expected " + std::to_string(p + 2) + " cells, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(p);
    for (std::size_t j = 0; j < p; ++j) {
      const auto cell = cells[j];
      if (cell.empty()) fail(source, line_no, "missing value in column f" + std::to_string(j));
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), row[j]);
      if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        fail(source, line_no, "column f" + std::to_string(j) + ": cannot parse '" +
                                  std::string(cell) + "'");
      }
      if (!std::isfinite(row[j])) {
        fail(source, line_no, "column f" + std::to_string(j) + ": non-finite value");
      }
    }
    auto parse_uint = [&](std::string_view cell, const char* column) {
      if (cell.empty()) fail(source, line_no, std::string("missing value in column ") + column);
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        fail(source, line_no, std::string("column ") + column +
                                  ": expected a non-negative integer, got '" + std::string(cell) + "'");
      }
      return v;
    };
    const auto label = parse_uint(cells[p], "label");
    const auto task = parse_uint(cells[p + 1], "task");
    if (label > 1'000'000) fail(source, line_no, "label out of range");
    auto [it, inserted] = tasks.try_emplace(static_cast<TaskId>(task));
    if (inserted) order.push_back(static_cast<TaskId>(task));
    auto& pending = it->second;
    pending.features.insert(pending.features.end(), row.begin(), row.end());
    pending.labels.push_back(static_cast<Label>(label));
    pending.max_label = std::max(pending.max_label, static_cast<Label>(label));
  }
  if (order.empty()) throw DataError(source + ": no data rows");

  std::vector<TaskDataset> train;
  for (TaskId id : order) {
    auto& pending = tasks.at(id);
    const std::size_t classes = std::max<std::size_t>(2, pending.max_label + 1);
    train.emplace_back(std::move(pending.features), p, std::move(pending.labels), id, classes);
  }
  return TaskSequence(std::move(train));
}

TaskSequence read_task_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_task_csv(in, path.string());
}

void write_task_csv(std::ostream& out, std::span<const TaskDataset> tasks) {
  if (tasks.empty()) throw DataError("nothing to write");
  const std::size_t p = tasks.front().feature_count();
  for (std::size_t j = 0; j < p; ++j) out << 'f' << j << ',';
  out << "label,task\n";
  for (const auto& t : tasks) {
    if (t.feature_count() != p) throw DataError("tasks disagree on feature count");
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (double v : t.row(i)) out << format_double(v) << ',';
      out << t.label(i) << ',' << t.task_id() << '\n';
    }
  }
}

void write_task_csv(const std::filesystem::path& path, std::span<const TaskDataset> tasks) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_task_csv(out, tasks);
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace odif
