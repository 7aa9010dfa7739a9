#pragma once

namespace pskfade {

/// Kernels with a data-parallel loop take this switch. `Serial` is the
/// reference path; both paths produce bit-identical results.
enum class Execution { Serial, Parallel };

/// Number of OpenMP threads used by `Execution::Parallel` (0 keeps the runtime default).
void set_thread_count(int threads);
int thread_count();

}  // namespace pskfade
