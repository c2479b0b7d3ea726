#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gapkin {

// Static partition of [0, n) into contiguous chunks, one per worker.
// fn(begin, end) must only touch data owned by its chunk.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn)
{
  std::size_t nt = static_cast<std::size_t>(std::max(1, threads));
  nt = std::min(nt, std::max<std::size_t>(n, 1));
  if (nt <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nt);
  std::size_t chunk = (n + nt - 1) / nt;
  for (std::size_t t = 0; t < nt; ++t) {
    std::size_t b = t * chunk, e = std::min(n, b + chunk);
    pool.emplace_back([&, t, b, e] {
      try {
        if (b < e) fn(b, e);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

} // namespace gapkin
