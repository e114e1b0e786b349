#include "horst/common/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace horst {

int resolve_threads(int n) {
  if (n > 0) return n;
  if (const char* env = std::getenv("HORST_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

void parallel_for(const ExecPolicy& pol, std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& body) {
  if (end <= begin) return;
  const std::int64_t n = end - begin;
  if (pol.serial() || n < 2) {
    body(begin, end);
    return;
  }
  const int nt = std::min<std::int64_t>(pol.threads, n);
  const std::int64_t chunk = (n + nt - 1) / nt;
  std::vector<std::thread> workers;
  workers.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    std::int64_t lo = begin + t * chunk;
    std::int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& w : workers) w.join();
}

} // namespace horst
