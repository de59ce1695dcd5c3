#pragma once

#include <cstdint>
#include <functional>

namespace npprior {

/// Worker count honoring the NPPRIOR_THREADS environment variable
/// (unset or 0 = hardware concurrency).
int thread_limit();

/// Runs fn(chunk_index, begin, end) over [0, total) split into fixed-size
/// chunks. Chunk boundaries depend only on (total, chunk_size), never on the
/// number of workers, so any chunk-wise deterministic computation yields
/// identical results for every thread count.
void for_each_chunk(std::int64_t total, std::int64_t chunk_size,
                    const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn);

}  // namespace npprior
