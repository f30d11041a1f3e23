#pragma once

#include <cstddef>
#include <functional>

namespace curveshift {

/// Run fn(i) for i in [0, count) on up to `threads` workers.
/// threads == 0 picks hardware concurrency; threads == 1 runs inline.
/// Work items must be independent; any ordering of execution is allowed.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

} // namespace curveshift
