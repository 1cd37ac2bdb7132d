// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <sstream>

#include "clozefit/pvp.hpp"
#include "json.hpp"

namespace clozefit {
namespace {

using nlohmann::json;

std::string scalar_to_string(const json& value, std::string_view key) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  throw Error("field '" + std::string(key) + "' must be a string, boolean or integer");
}

const json* find_field(const json& record, const std::string& name) {
  if (auto it = record.find(name); it != record.end()) return &*it;
  // FewGLUE nests the WSC spans under "target".
  if (auto target = record.find("target"); target != record.end() && target->is_object()) {
    if (auto it = target->find(name + "_text"); it != target->end()) return &*it;
  }
  return nullptr;
}

std::optional<std::string> raw_label(const json& record) {
  auto it = record.find("label");
  if (it == record.end() || it->is_null()) return std::nullopt;
  return scalar_to_string(*it, "label");
}

}  // namespace

TaskExample parse_task_example(std::string_view line, TaskId task) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed record: ") + e.what());
  }
  if (!record.is_object()) throw Error("record must be a JSON object");

  const auto& schema = task_schema(task);
  TaskExample ex;
  ex.task = task;
  for (const auto& name : schema.fields) {
    const json* value = find_field(record, name);
    if (!value) throw Error("missing field '" + name + "'");
    if (name == "entities" && value->is_array()) {
      std::string joined;
      for (const auto& e : *value) {
        if (!joined.empty()) joined.push_back(kEntitySeparator);
        joined += scalar_to_string(e, name);
      }
      ex.fields[name] = std::move(joined);
    } else {
      ex.fields[name] = scalar_to_string(*value, name);
    }
  }
  ex.label = raw_label(record);
  if (ex.label) {
    const auto labels = example_labels(ex);
    if (std::find(labels.begin(), labels.end(), *ex.label) == labels.end()) {
      throw Error("unknown label '" + *ex.label + "'");
    }
  }
  return ex;
}

std::vector<TaskExample> parse_task_examples(std::string_view text, TaskId task) {
  std::vector<TaskExample> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      if (task == TaskId::kWsc) {
        // Only positive WSC examples carry a usable verbalization.
        const auto record = json::parse(line, nullptr, false);
        if (!record.is_discarded() && record.is_object()) {
          auto label = raw_label(record);
          if (label && *label == "false") continue;
        }
      }
      out.push_back(parse_task_example(line, task));
    } catch (const Error& e) {
      throw Error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<TaskExample> load_task_examples(const std::filesystem::path& path, TaskId task) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open task file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_task_examples(buf.str(), task);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string format_task_example(const TaskExample& example) {
  json record = json::object();
  for (const auto& [name, value] : example.fields) {
    if (name == "entities") {
      json list = json::array();
      for (const auto& e : example_labels(example)) list.push_back(e);
      record[name] = std::move(list);
    } else {
      record[name] = value;
    }
  }
  if (example.label) record["label"] = *example.label;
  return record.dump();
}

void save_task_examples(const std::filesystem::path& path, std::span<const TaskExample> examples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write task file " + path.string());
  for (const auto& ex : examples) out << format_task_example(ex) << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace clozefit
