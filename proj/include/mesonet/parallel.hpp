#pragma once

#include <cstddef>
#include <functional>

namespace mesonet {

/// Worker count: MESONET_THREADS when set and positive, otherwise the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Calls body(begin, end) over contiguous blocks covering [0, count). Blocks
/// write disjoint outputs, so results do not depend on the thread count.
void parallel_for_blocks(std::size_t count,
                         const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace mesonet
