#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace adseq {

/// Global cap on worker threads (CLI --threads). 0 means hardware default.
void set_max_threads(int n);
int max_threads();

/// Static-chunk parallel loop. Results must not depend on the chunking;
/// callers write to disjoint slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Deterministic pairwise summation; independent of thread count because it
/// is always applied to a fully materialized vector.
double pairwise_sum(std::span<const double> v);

}  // namespace adseq
