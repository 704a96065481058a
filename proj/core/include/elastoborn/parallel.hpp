#pragma once

#include <cstddef>
#include <functional>

namespace elastoborn {

// Worker count: ELASTOBORN_THREADS if set, else hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Runs body(begin, end) over disjoint chunks of [0, n). Work items must be
// independent; results do not depend on the chunking.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

// Sum of f(i) over [0, n) in fixed 4096-element blocks combined in index order.
double ordered_sum(std::size_t n, const std::function<double(std::size_t)>& f);

}  // namespace elastoborn
