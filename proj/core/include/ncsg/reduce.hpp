#pragma once

#include <cstddef>
#include <functional>

namespace ncsg {

// Pairwise (cascade) summation over an indexed term generator.
//
// All scalar accumulations that feed reported numbers go through this so
// results are independent of chunking and thread count: evaluation order is
// a fixed balanced binary split over [0, n).
template <typename T>
T pairwise_sum(std::size_t n, const std::function<T(std::size_t)>& term) {
  // Recursive lambda over [lo, lo+len).
  struct Rec {
    const std::function<T(std::size_t)>& f;
    T run(std::size_t lo, std::size_t len) const {
      if (len == 0) return T{};
      if (len == 1) return f(lo);
      if (len == 2) return f(lo) + f(lo + 1);
      const std::size_t half = len / 2;
      return run(lo, half) + run(lo + half, len - half);
    }
  };
  return Rec{term}.run(0, n);
}

}  // namespace ncsg
