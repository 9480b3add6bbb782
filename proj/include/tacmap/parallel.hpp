#pragma once

#include <cstddef>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

#include "tacmap/error.hpp"

namespace tacmap {

// Reads TACMAP_THREADS. 0 or unset means "let the scheduler decide".
inline std::size_t thread_cap_from_env() {
  const char* raw = std::getenv("TACMAP_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const long value = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || value < 0) {
    throw InputError(std::string("TACMAP_THREADS must be a non-negative integer, got '") +
                     raw + "'");
  }
  return static_cast<std::size_t>(value);
}

// Caps worker parallelism for as long as the object lives.
class ThreadLimit {
 public:
  explicit ThreadLimit(std::size_t max_threads) {
    if (max_threads > 0) {
      control_ = std::make_unique<tbb::global_control>(
          tbb::global_control::max_allowed_parallelism, max_threads);
    }
  }

  static ThreadLimit from_env() { return ThreadLimit(thread_cap_from_env()); }

  static std::size_t active_parallelism() {
    return tbb::global_control::active_value(tbb::global_control::max_allowed_parallelism);
  }

 private:
  std::unique_ptr<tbb::global_control> control_;
};

// Runs body(i) for i in [0, n). Iterations must write disjoint outputs.
template <typename Body>
void parallel_for_each_index(std::size_t n, Body&& body) {
  if (n == 0) return;
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n),
                    [&](const tbb::blocked_range<std::size_t>& range) {
                      for (std::size_t i = range.begin(); i != range.end(); ++i) body(i);
                    });
}

}  // namespace tacmap
