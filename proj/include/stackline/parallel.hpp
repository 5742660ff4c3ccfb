#pragma once

#include <cstddef>
#include <functional>

namespace stackline {

/// Worker cap from STACKLINE_THREADS: unset means hardware concurrency,
/// 0 or 1 means serial.
std::size_t worker_count();

/// Runs task(i) for i in [0, n) on up to worker_count() threads. Tasks must
/// write only to their own slots. If any task throws, the exception of the
/// lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace stackline
