#pragma once

#include <cstddef>
#include <functional>

namespace gcms {

// Runs fn(0..n) across up to `jobs` threads. Work units must be
// independent; callers that care about output order index into
// preallocated slots. Rethrows the first worker exception.
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace gcms
