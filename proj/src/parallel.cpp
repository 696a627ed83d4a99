#include "freqlab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace freqlab {

int effective_threads(int requested) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("FREQLAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < n) n = cap;
  }
  return n;
}

void parallel_chunks(int nchunks, const std::function<void(int)>& fn,
                     int threads) {
  const int nt = std::min(effective_threads(threads), nchunks);
  if (nt <= 1) {
    for (int c = 0; c < nchunks; ++c) fn(c);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int c = next.fetch_add(1);
      if (c >= nchunks) return;
      fn(c);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nt - 1);
  for (int i = 0; i < nt - 1; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

} // namespace freqlab
