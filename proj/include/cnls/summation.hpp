#pragma once

#include <cstddef>
#include <span>

namespace cnls {

// Pairwise (cascade) summation. The split points depend only on the length,
// so the result is reproducible for a given data layout.
template <typename Term>
double pairwise_sum(std::size_t begin, std::size_t end, const Term& term) {
  constexpr std::size_t kBlock = 64;
  if (end - begin <= kBlock) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

template <typename Term>
double pairwise_sum(std::size_t count, const Term& term) {
  return pairwise_sum(std::size_t{0}, count, term);
}

inline double pairwise_sum(std::span<const double> values) {
  return pairwise_sum(values.size(), [&](std::size_t i) { return values[i]; });
}

}  // namespace cnls
