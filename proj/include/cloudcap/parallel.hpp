// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace cloudcap {

/// Kernels that have an OpenMP version keep a serial reference; both
/// produce identical results.
enum class Execution
{
    serial,
    parallel,
};

/// Worker count from CLOUDCAP_THREADS, falling back to the OpenMP default.
int configured_threads();

/// Applies configured_threads() to the OpenMP runtime.
void apply_thread_limit();

}  // namespace cloudcap
