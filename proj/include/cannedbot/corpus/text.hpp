// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cannedbot::corpus {

/// Masks digits to '0', lowercases ASCII, collapses runs of whitespace to a
/// single space and strips both ends. "Your PIN is 94567" -> "your pin is 00000".
std::string normalize_text(std::string_view raw);

/// Whitespace split of already-normalized text.
std::vector<std::string> tokenize(std::string_view normalized);

}  // namespace cannedbot::corpus
