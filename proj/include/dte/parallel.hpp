#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "dte/so3.hpp"

namespace dte {

/// DTE_THREADS if set and positive, otherwise the hardware concurrency.
std::size_t default_thread_count();

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = default). The
/// exception thrown by the lowest failing index is rethrown after all workers
/// finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t threads = 0);

/// Independent RNG stream derived from (master, a, b) by SplitMix64 mixing, so
/// results never depend on scheduling.
Rng make_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

}  // namespace dte
