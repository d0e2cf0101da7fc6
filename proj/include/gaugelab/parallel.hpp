#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <numeric>
#include <span>
#include <vector>

namespace gaugelab {

void set_thread_count(int n);
int thread_count();

// Runs body(i) for i in [0, n) across threads. Each index writes its own
// output slot; the first exception thrown by any index is rethrown.
template <typename Body>
void parallel_for(std::ptrdiff_t n, Body&& body) {
  std::exception_ptr failure;
  std::mutex guard;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Sum with a fixed pairwise tree, independent of thread count.
template <typename T>
T pairwise_sum(std::span<const T> values) {
  if (values.empty()) return T{};
  if (values.size() <= 8) {
    T s{};
    for (const auto& v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

// Block-parallel reduction: fixed block size, blocks summed serially inside,
// block partials combined pairwise. Deterministic for any thread count.
template <typename T, typename Term>
T deterministic_reduce(std::ptrdiff_t n, Term&& term) {
  constexpr std::ptrdiff_t block = 4096;
  const std::ptrdiff_t blocks = (n + block - 1) / block;
  std::vector<T> partial(static_cast<std::size_t>(blocks), T{});
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    T s{};
    const std::ptrdiff_t end = std::min(n, (b + 1) * block);
    for (std::ptrdiff_t i = b * block; i < end; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  return pairwise_sum(std::span<const T>(partial));
}

}  // namespace gaugelab
