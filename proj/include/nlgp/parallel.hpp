#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace nlgp {

// Evaluates f(0..count-1) on up to `threads` workers; results keep index order,
// and the exception of the lowest failing index is rethrown.
template <class F>
auto parallel_map(std::size_t count, int threads, F&& f)
    -> std::vector<std::invoke_result_t<F&, std::size_t>>
{
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back(worker);
    for (auto& t : pool)
      t.join();
  }

  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots)
    out.push_back(std::move(*s));
  return out;
}

} // namespace nlgp
