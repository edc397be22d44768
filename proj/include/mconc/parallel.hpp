#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mconc {

// Thread count: the process-wide override if set, else MCONC_THREADS if set and
// positive, else hardware concurrency.
unsigned default_thread_count();

// 0 clears the override.
void set_default_thread_count(unsigned threads);

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is handled
// exactly once; callers write results into index-addressed storage and reduce
// sequentially afterwards. Exceptions from body are rethrown (lowest index first).
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body);

// Pairwise (cascade) summation; fixed reduction tree for a given length.
double pairwise_sum(std::span<const double> values);

}  // namespace mconc

#include "mconc/parallel_impl.hpp"
