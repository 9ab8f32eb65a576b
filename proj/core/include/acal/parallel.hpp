#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace acal {

/// Applies `fn` to every item using up to `workers` threads and returns the
/// results in input order. If any call throws, the exception of the lowest
/// failing index is rethrown after all workers finish.
template <typename T, typename F>
auto parallel_map(const std::vector<T>& items, F fn, std::size_t workers)
    -> std::vector<std::invoke_result_t<F&, const T&>> {
  using R = std::invoke_result_t<F&, const T&>;
  std::vector<std::optional<R>> slots(items.size());
  std::vector<std::exception_ptr> errors(items.size());

  auto run_one = [&](std::size_t i) {
    try {
      slots[i].emplace(fn(items[i]));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const std::size_t n_threads = std::min(workers, items.size());
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1)) run_one(i);
      });
    }
  }

  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(items.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace acal
