#pragma once

#include <cstddef>
#include <functional>

namespace emperor {

/// Runs body(0), ..., body(count - 1), spreading the calls over up to
/// `threads` workers. Each index is executed exactly once; the assignment of
/// indices to workers is unspecified, so bodies must only write to
/// index-owned slots if they want thread-count-independent results. With
/// threads <= 1 the loop runs serially on the calling thread. The first
/// exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace emperor
