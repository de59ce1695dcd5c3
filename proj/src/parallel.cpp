#include "npprior/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace npprior {

int thread_limit() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  const char* env = std::getenv("NPPRIOR_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  long v = std::strtol(env, nullptr, 10);
  if (v <= 0) return hw;
  return static_cast<int>(v < hw ? v : hw);
}

void for_each_chunk(std::int64_t total, std::int64_t chunk_size,
                    const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn) {
  if (total <= 0) return;
  if (chunk_size <= 0) chunk_size = total;
  const std::int64_t chunks = (total + chunk_size - 1) / chunk_size;
  const int workers = static_cast<int>(std::min<std::int64_t>(thread_limit(), chunks));

  auto run = [&](std::int64_t c) {
    const std::int64_t b = c * chunk_size;
    const std::int64_t e = std::min(total, b + chunk_size);
    fn(c, b, e);
  };

  if (workers <= 1) {
    for (std::int64_t c = 0; c < chunks; ++c) run(c);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::int64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) run(c);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace npprior
