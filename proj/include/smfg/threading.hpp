#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace smfg {

// Process-wide worker count used by parallel_for.  0 means hardware default.
void set_thread_count(int threads);
int thread_count();

// Runs fn(i) for i in [0, n).  Work items must be independent; callers that
// aggregate must write into pre-sized slots and reduce in index order so
// results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace smfg
