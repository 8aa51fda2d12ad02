#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace eoslab::detail {

// Fixed number of blocks [0, count) is cut into, whatever the thread count.
inline constexpr std::size_t kBlocks = 16;

// Runs fn(begin, end) once per block. The blocks depend only on count, so
// results that are a function of the block do not depend on the number of
// workers.
template <class Fn>
void parallel_chunks(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t blocks = std::min(kBlocks, std::max<std::size_t>(count, 1));
  const std::size_t size = (count + blocks - 1) / blocks;
  auto run_block = [&](std::size_t b) {
    const std::size_t begin = std::min(count, b * size);
    fn(begin, std::min(count, begin + size));
  };
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, blocks));
  if (threads <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (std::size_t b = t; b < blocks; b += threads) run_block(b);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace eoslab::detail
