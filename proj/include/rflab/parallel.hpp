#pragma once

#include <cstddef>

namespace rflab {

// Below these sizes the OpenMP fork/join costs more than the loop.
inline constexpr std::ptrdiff_t kParallelGridThreshold = 4096;
inline constexpr std::ptrdiff_t kParallelSourceThreshold = 8;

int max_threads();

}  // namespace rflab
