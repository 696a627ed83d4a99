#pragma once

#include <functional>

namespace freqlab {

/// Resolves a requested thread count: 0 means hardware concurrency, and the
/// FREQLAB_THREADS environment variable caps the result either way.
int effective_threads(int requested = 0);

/// Runs fn(chunk) for chunk = 0..nchunks-1 on a transient worker pool.
/// Chunks must write only to chunk-indexed storage; callers combine partial
/// results in chunk order afterwards, which keeps every reduction bit-equal
/// regardless of the worker count.
void parallel_chunks(int nchunks, const std::function<void(int)>& fn,
                     int threads = 0);

} // namespace freqlab
