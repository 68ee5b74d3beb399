// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/numerics/tensor.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace cannedbot::numerics {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nlohmann::json manifest;
  ParameterStore params;
};

/// Binary layout (little-endian):
///   "CBCKPT\0\0" | u32 version | u64 len | manifest JSON | u64 count |
///   count x (u64 len | name | u64 rows | u64 cols | rows*cols f64) | u64 digest
void save_checkpoint(const std::filesystem::path& path, const ParameterStore& params,
                     const nlohmann::json& manifest);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// FNV-1a over names, shapes and raw values; printed as 16 hex digits.
std::string parameter_digest(const ParameterStore& params);

}  // namespace cannedbot::numerics
