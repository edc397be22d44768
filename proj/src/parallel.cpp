#include "mconc/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

namespace mconc {

namespace {
std::atomic<unsigned> thread_override{0};
}  // namespace

void set_default_thread_count(unsigned threads) { thread_override = threads; }

unsigned default_thread_count() {
  if (const unsigned o = thread_override.load(); o > 0) return o;
  if (const char* env = std::getenv("MCONC_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace mconc
