#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace hypcmc {

/// Worker count: hardware concurrency, capped by HYPCMC_THREADS when set.
int worker_count();

/// Contiguous chunks of [0, n), one per worker.  Chunk boundaries depend only
/// on n and the worker count, so gathered results are deterministic.
std::vector<std::pair<std::size_t, std::size_t>> chunk_ranges(std::size_t n);

/// Runs body(chunk_index, begin, end) over chunk_ranges(n), concurrently when
/// more than one worker is available.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace hypcmc
