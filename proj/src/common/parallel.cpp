#include "common/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace artpipe {

std::size_t worker_count() {
  std::size_t count = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ARTPIPE_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) count = std::min<std::size_t>(count, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
      // unparsable values are ignored
    }
  }
  return count;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace artpipe
