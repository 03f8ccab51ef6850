// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace minmod {

unsigned default_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 means
/// default_threads()). The first exception thrown by any body is rethrown
/// after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace minmod
