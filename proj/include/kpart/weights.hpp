#pragma once

// Weight vectors a_1..a_{n/2} selecting which bipartition families enter a
// criterion for depth k in an n-party system.

#include "kpart/partitions.hpp"

#include <array>
#include <string>

namespace kpart {

struct WeightVector {
  int k = 0;
  int n = 0;
  /// a[i-1] is the weight of the size-i bipartitions.
  std::vector<double> a;

  double operator()(int i) const { return a.at(static_cast<std::size_t>(i - 1)); }

  /// Sum_i a_i N_i; equals 1 for the k = 2 tables.
  double weighted_count() const {
    double s = 0.0;
    for (int i = 1; i <= static_cast<int>(a.size()); ++i) s += a[static_cast<std::size_t>(i - 1)] * static_cast<double>(bipartition_count(n, i));
    return s;
  }

  void validate() const {
    if (n < 2) throw std::invalid_argument("WeightVector: n < 2");
    if (k < 2 || k > n) throw std::invalid_argument("WeightVector: k outside [2, n]");
    if (a.size() != static_cast<std::size_t>(n / 2)) throw std::invalid_argument("WeightVector: need n/2 entries");
    for (double x : a) {
      if (!(x >= 0.0)) throw std::invalid_argument("WeightVector: negative weight");
    }
  }
};

namespace detail {

struct TableRow {
  int k;
  int n;
  std::array<std::array<int, 2>, 6> a;  // numerator/denominator, a_1 first
};

// Rows as printed: each bracket lists a_1 first and a_{n/2} last.
inline constexpr std::array<TableRow, 66> weight_table{{
    {2, 2, {{{1, 1}}}},
    {2, 3, {{{1, 3}}}},
    {3, 3, {{{1, 1}}}},
    {2, 4, {{{0, 1}, {1, 3}}}},
    {3, 4, {{{0, 1}, {1, 1}}}},
    {4, 4, {{{1, 1}, {1, 1}}}},
    {2, 5, {{{0, 1}, {1, 10}}}},
    {3, 5, {{{0, 1}, {1, 2}}}},
    {4, 5, {{{0, 1}, {1, 1}}}},
    {5, 5, {{{1, 1}, {1, 1}}}},
    {2, 6, {{{0, 1}, {0, 1}, {1, 10}}}},
    {3, 6, {{{0, 1}, {1, 3}, {0, 1}}}},
    {4, 6, {{{0, 1}, {1, 3}, {1, 1}}}},
    {5, 6, {{{0, 1}, {1, 1}, {1, 1}}}},
    {6, 6, {{{1, 1}, {1, 1}, {1, 1}}}},
    {2, 7, {{{0, 1}, {0, 1}, {1, 35}}}},
    {3, 7, {{{0, 1}, {0, 1}, {1, 3}}}},
    {4, 7, {{{0, 1}, {0, 1}, {1, 2}}}},
    {5, 7, {{{0, 1}, {0, 1}, {1, 1}}}},
    {6, 7, {{{0, 1}, {1, 1}, {1, 1}}}},
    {7, 7, {{{1, 1}, {1, 1}, {1, 1}}}},
    {2, 8, {{{0, 1}, {0, 1}, {0, 1}, {1, 35}}}},
    {3, 8, {{{0, 1}, {0, 1}, {0, 1}, {1, 3}}}},
    {4, 8, {{{0, 1}, {0, 1}, {1, 2}, {1, 3}}}},
    {5, 8, {{{0, 1}, {0, 1}, {1, 2}, {1, 1}}}},
    {6, 8, {{{0, 1}, {0, 1}, {1, 1}, {1, 1}}}},
    {7, 8, {{{0, 1}, {1, 1}, {1, 1}, {1, 1}}}},
    {8, 8, {{{1, 1}, {1, 1}, {1, 1}, {1, 1}}}},
    {2, 9, {{{0, 1}, {0, 1}, {0, 1}, {1, 126}}}},
    {3, 9, {{{0, 1}, {0, 1}, {0, 1}, {1, 6}}}},
    {4, 9, {{{0, 1}, {0, 1}, {1, 3}, {0, 1}}}},
    {5, 9, {{{0, 1}, {0, 1}, {1, 3}, {1, 2}}}},
    {6, 9, {{{0, 1}, {0, 1}, {1, 3}, {1, 1}}}},
    {7, 9, {{{0, 1}, {0, 1}, {1, 1}, {1, 1}}}},
    {8, 9, {{{0, 1}, {1, 1}, {1, 1}, {1, 1}}}},
    {9, 9, {{{1, 1}, {1, 1}, {1, 1}, {1, 1}}}},
    {2, 10, {{{0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 126}}}},
    {3, 10, {{{0, 1}, {0, 1}, {0, 1}, {1, 10}, {0, 1}}}},
    {4, 10, {{{0, 1}, {0, 1}, {0, 1}, {1, 3}, {0, 1}}}},
    {5, 10, {{{0, 1}, {0, 1}, {0, 1}, {1, 2}, {0, 1}}}},
    {6, 10, {{{0, 1}, {0, 1}, {0, 1}, {1, 2}, {1, 1}}}},
    {7, 10, {{{0, 1}, {0, 1}, {0, 1}, {1, 1}, {1, 1}}}},
    {8, 10, {{{0, 1}, {0, 1}, {1, 1}, {1, 1}, {1, 1}}}},
    {9, 10, {{{0, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}}}},
    {10, 10, {{{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}}}},
    {2, 11, {{{0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 462}}}},
    {3, 11, {{{0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 10}}}},
    {4, 11, {{{0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 3}}}},
    {5, 11, {{{0, 1}, {0, 1}, {0, 1}, {1, 2}, {1, 3}}}},
    {6, 11, {{{0, 1}, {0, 1}, {0, 1}, {1, 2}, {1, 2}}}},
    {7, 11, {{{0, 1}, {0, 1}, {0, 1}, {1, 2}, {1, 1}}}},
    {8, 11, {{{0, 1}, {0, 1}, {0, 1}, {1, 1}, {1, 1}}}},
    {9, 11, {{{0, 1}, {0, 1}, {1, 1}, {1, 1}, {1, 1}}}},
    {10, 11, {{{0, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}}}},
    {11, 11, {{{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}}}},
    {2, 12, {{{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 462}}}},
    {3, 12, {{{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 10}}}},
    {4, 12, {{{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 3}}}},
    {5, 12, {{{0, 1}, {0, 1}, {0, 1}, {1, 3}, {0, 1}, {1, 3}}}},
    {6, 12, {{{0, 1}, {0, 1}, {0, 1}, {1, 3}, {1, 2}, {1, 3}}}},
    {7, 12, {{{0, 1}, {0, 1}, {0, 1}, {1, 3}, {1, 2}, {1, 1}}}},
    {8, 12, {{{0, 1}, {0, 1}, {0, 1}, {1, 3}, {1, 1}, {1, 1}}}},
    {9, 12, {{{0, 1}, {0, 1}, {0, 1}, {1, 1}, {1, 1}, {1, 1}}}},
    {10, 12, {{{0, 1}, {0, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}}}},
    {11, 12, {{{0, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}}}},
    {12, 12, {{{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}}}},
}};

}  // namespace detail

/// Tabulated weights for 2 <= k <= n <= 12.
inline WeightVector builtin_weights(int k, int n) {
  if (n < 2 || n > 12 || k < 2 || k > n) {
    throw unsupported_error("builtin_weights: no table entry for k=" + std::to_string(k) + ", n=" + std::to_string(n));
  }
  for (const auto& row : detail::weight_table) {
    if (row.k != k || row.n != n) continue;
    WeightVector w{k, n, {}};
    for (int i = 0; i < n / 2; ++i) {
      const auto& frac = row.a[static_cast<std::size_t>(i)];
      w.a.push_back(static_cast<double>(frac[0]) / static_cast<double>(frac[1]));
    }
    return w;
  }
  throw unsupported_error("builtin_weights: missing row");
}

/// Single-excitation family: a_1 = 1/(n-k+1) for k != 2, a_1 = 1/n for k = 2.
inline WeightVector w_state_weights(int k, int n) {
  if (n < 2 || k < 2 || k > n) throw std::invalid_argument("w_state_weights: need 2 <= k <= n");
  WeightVector w{k, n, std::vector<double>(static_cast<std::size_t>(n / 2), 0.0)};
  w.a[0] = (k == 2) ? 1.0 / n : 1.0 / (n - (k - 1));
  return w;
}

/// Alternative k = 3 choice for n > 8: a_4 = 1 / (m (m - 1) / 2) with m = floor(n/2).
inline WeightVector quartet_weights(int n) {
  if (n <= 8) throw std::invalid_argument("quartet_weights: requires n > 8");
  const int m = n / 2;
  WeightVector w{3, n, std::vector<double>(static_cast<std::size_t>(m), 0.0)};
  w.a[3] = 2.0 / (m * (m - 1.0));
  return w;
}

}  // namespace kpart
