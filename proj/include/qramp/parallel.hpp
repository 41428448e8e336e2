// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace qramp {

/// Worker count for parallel maps. Read once from QRAMP_THREADS, defaulting
/// to the hardware concurrency.
std::size_t worker_count();

/// Run fn(0..n-1), possibly on several threads. Results must be written to
/// per-index slots by the caller; the reduction order is then deterministic
/// regardless of the number of workers. Rethrows the first exception.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qramp
