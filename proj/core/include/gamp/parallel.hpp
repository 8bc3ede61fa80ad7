#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>

namespace gamp {

// Worker count from GAMP_WORKERS, else the hardware concurrency (at least 1).
std::size_t worker_count();

// Runs task(0..count-1) on a pool of workers. Tasks must write to disjoint slots; the first
// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task, std::size_t workers = 0);

// Deterministic per-task seed derived from a base seed and task coordinates.
std::uint64_t task_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys);

}  // namespace gamp
