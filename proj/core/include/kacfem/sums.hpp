#pragma once

#include <cstddef>
#include <span>

namespace kacfem {

/// Pairwise (cascade) summation. Used for every reduction whose value feeds a
/// reported diagnostic, so serial and element-parallel evaluation orders agree
/// to roundoff.
inline double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline double pairwise_dot(std::span<const double> a, std::span<const double> b,
                           std::span<double> scratch) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) scratch[i] = a[i] * b[i];
  return pairwise_sum(scratch.first(n));
}

}  // namespace kacfem
