#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gfchan {

// Runs f(i) for i in [0, n) over `threads` workers in contiguous chunks.
// Callers store per-index results and reduce in index order afterwards, so
// the outcome is identical for any worker count.
template <typename F>
void for_each_index(std::size_t n, int threads, F&& f) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  std::exception_ptr err;
  std::mutex err_mu;
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w]() {
      const std::size_t lo = w * n / nw;
      const std::size_t hi = (w + 1) * n / nw;
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace gfchan
