#ifndef HORST_COMMON_PARALLEL_HPP
#define HORST_COMMON_PARALLEL_HPP

#include <cstdint>
#include <functional>

namespace horst {

/// Execution policy shared by assembly, factorization and solves.
/// threads <= 1 or deterministic == true forces a serial schedule with a
/// fixed traversal and reduction order, which makes runs bit-reproducible.
struct ExecPolicy {
  int threads = 1;
  bool deterministic = true;

  bool serial() const { return deterministic || threads <= 1; }
};

/// Resolve a thread-count request: n > 0 wins, otherwise the HORST_THREADS
/// environment variable, otherwise the hardware concurrency.
int resolve_threads(int n);

/// Chunked parallel loop over [begin, end); serial when the policy says so.
/// The body must not throw across chunks.
void parallel_for(const ExecPolicy& pol, std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& body);

} // namespace horst

#endif
