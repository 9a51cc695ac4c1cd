#pragma once

namespace fub {

/// Current OpenMP thread budget (1 when built without OpenMP).
int max_threads();

/// Override the thread budget for subsequent parallel regions.
void set_threads(int n);

/// Apply the FUB_THREADS environment variable if set; returns the
/// resulting thread budget.
int apply_thread_env();

}  // namespace fub
