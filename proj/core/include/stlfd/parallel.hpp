#pragma once

#include <cstddef>
#include <functional>

namespace stlfd {

/// Thread count from STLFD_THREADS; 0 or unset means hardware concurrency.
int configured_threads() noexcept;

/// Runs body(i) for i in [0, n) on up to `threads` workers (<= 0 means
/// configured_threads()). Each index runs exactly once; the first exception
/// thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace stlfd
