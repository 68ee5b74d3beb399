// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/jsonl.hpp"

#include "cannedbot/error.hpp"

#include <fstream>
#include <string>

namespace cannedbot {

namespace {

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  return tmp;
}

void commit(const std::filesystem::path& tmp, const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::ofstream open_out(const std::filesystem::path& tmp) {
  if (tmp.has_parent_path()) std::filesystem::create_directories(tmp.parent_path());
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
  return out;
}

}  // namespace

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records) {
  const auto tmp = temp_sibling(path);
  {
    auto out = open_out(tmp);
    for (const Json& r : records) out << r.dump() << '\n';
    if (!out.flush()) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  commit(tmp, path);
}

void read_jsonl(const std::filesystem::path& path, const std::function<void(const Json&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      fn(record);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& value) {
  const auto tmp = temp_sibling(path);
  {
    auto out = open_out(tmp);
    out << value.dump(2) << '\n';
    if (!out.flush()) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  commit(tmp, path);
}

}  // namespace cannedbot
