// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace shadenorm {

// Worker count: hardware concurrency, capped by SHADENORM_THREADS when set.
int thread_count();

// Runs body(begin, end) over disjoint chunks covering [0, n). Chunk
// boundaries depend on the thread count, so bodies must only write
// per-index outputs (or per-chunk partials merged in chunk order).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 1);

} // namespace shadenorm
