/// @file parallel.hpp
/// @brief Deterministic row-partition parallelism.
///
/// Every parallel loop in flowsal writes to disjoint output ranges, so
/// results are bit-identical for any worker count. The worker count is a
/// process-wide performance knob (like OMP_NUM_THREADS), never a source of
/// nondeterminism.

#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace flowsal {

/// Process-wide worker count. 0 selects hardware concurrency.
void set_worker_count(int workers);
int worker_count();

/// Runs fn(begin, end) over [0, n) split into contiguous chunks, one per
/// worker. fn must only write state owned by its own index range.
void parallel_for_chunks(int n, const std::function<void(int, int)>& fn);

/// Convenience wrapper: fn(i) for each i in [0, n).
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace flowsal
