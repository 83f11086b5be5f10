#pragma once

#include <cstddef>
#include <functional>

namespace flip {

// Worker cap for parallel_for; 0 means use the hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs fn(0..count-1) across workers. Callers write results into disjoint,
// index-addressed slots and reduce serially afterwards, so outputs are
// independent of the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace flip
