// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

namespace cannedbot {

using Json = nlohmann::json;

/// Writes one compact record per line via a sibling temp file and rename.
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records);

/// Calls `fn` for every non-blank line. Throws Io if the file cannot be
/// opened and Parse (with the line number) on malformed records.
void read_jsonl(const std::filesystem::path& path, const std::function<void(const Json&)>& fn);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& value);

}  // namespace cannedbot
