#include "polygas/runtime.hpp"

#include <atomic>
#include <stdexcept>

namespace polygas {

namespace {
std::atomic<int> worker_count{1};
}

int worker_threads() { return worker_count.load(); }

void set_worker_threads(int n) {
  if (n < 1 || n > 256) throw std::invalid_argument("worker thread count out of range");
  worker_count.store(n);
}

}  // namespace polygas
