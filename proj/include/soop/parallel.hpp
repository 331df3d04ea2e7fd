#pragma once

// Every data-parallel kernel in the library has two entry points selected by
// `Execution`: a plain serial loop kept as the reference, and an OpenMP loop.
// Both produce bit-identical results; the tests hold them to that.

namespace soop {

enum class Execution { Serial, Parallel };

/// Sets the OpenMP worker count for subsequent parallel kernels (<= 0 keeps
/// the runtime default).
void set_thread_count(int threads);

/// Number of OpenMP workers a parallel region will use.
int thread_count();

}  // namespace soop
