#pragma once

#include <cstddef>
#include <functional>

namespace dwloa::parallel {

/// Worker count used when a call passes jobs = 0. Defaults to the hardware concurrency.
void set_default_jobs(unsigned jobs);
unsigned default_jobs();

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Iterations are handed
/// out dynamically, so body must only write to state owned by index i.
/// The first exception thrown by any iteration is rethrown on the caller.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body,
                    unsigned jobs = 0);

}  // namespace dwloa::parallel
