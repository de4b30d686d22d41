// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace drawspace {

/// Canonical label form used for every equality check: surrounding
/// whitespace trimmed, inner whitespace runs collapsed to one space,
/// ASCII letters lowercased.
std::string normalize_label(std::string_view label);

}  // namespace drawspace
