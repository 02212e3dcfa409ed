#pragma once

namespace dlinpaint {

/// Selects between the OpenMP kernel and its serial reference. Both produce
/// identical results; the serial path exists for testing and benchmarking.
enum class Execution { serial, parallel };

/// Caps OpenMP worker threads (n <= 0 leaves the runtime default).
void set_thread_count(int n);

}  // namespace dlinpaint
