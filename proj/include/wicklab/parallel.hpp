#pragma once

// Minimal deterministic parallelism: independent jobs run on up to
// WICKLAB_THREADS workers; results land in their submission slots, so the
// output is independent of scheduling.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace wicklab {

inline int thread_cap() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("WICKLAB_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) return std::min(cap, hw);
  }
  return hw;
}

template <class R>
std::vector<R> run_jobs(const std::vector<std::function<R()>>& jobs) {
  std::vector<R> results(jobs.size());
  const int workers = std::min<int>(thread_cap(), static_cast<int>(jobs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = jobs[i]();
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        results[i] = jobs[i]();
      }
    });
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace wicklab
