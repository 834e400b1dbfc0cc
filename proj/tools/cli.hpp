// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shadenorm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1; // bad data, missing files, unmet coverage
inline constexpr int kExitUsage = 2;  // malformed or invalid flags

// Machine-readable output (report paths or JSON) goes to `out`, the human
// summary to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace shadenorm::cli
