#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace pphi {

// Global worker count for parallel loops; set once from the CLI --threads flag.
int worker_threads();
void set_worker_threads(int n);

// Runs fn(i) for i in [0, n). Work items must write only to their own slots;
// results are then deterministic regardless of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace pphi
