#pragma once

#include <functional>

namespace fracdiff {

/// Worker count used by parallel_for (default 1). Results never depend on it:
/// every index is written by exactly one worker and reductions stay serial.
void set_thread_count(int n);
int thread_count();

/// Runs body(lo, hi) over a fixed contiguous partition of [0, n).
void parallel_for(long n, const std::function<void(long lo, long hi)>& body);

}  // namespace fracdiff
