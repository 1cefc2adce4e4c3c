#pragma once

#include <cstddef>
#include <functional>

namespace qr {

// Number of worker threads used by parallel_for. 0 means
// std::thread::hardware_concurrency().
void set_thread_count(unsigned threads);
unsigned thread_count();

// Runs body(i) for every i in [0, count). Items are handed out in
// contiguous chunks; callers write results into per-item slots and reduce
// afterwards in index order, so results never depend on the thread count.
// The first exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace qr
