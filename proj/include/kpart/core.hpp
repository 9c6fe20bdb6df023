#pragma once

// Shared scalar types, error classes and small helpers.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpart {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Per-party local dimensions, party 0 first.
using Dims = std::vector<int>;

/// Bit set over parties. Party k (0-based) of an n-party system maps to bit
/// (n - 1 - k), matching the basis-index encoding where party 0 is the most
/// significant digit.
using PartyMask = std::uint64_t;

class unsupported_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class positivity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class not_found_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class insufficient_data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::size_t total_dim(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t acc, int d) { return acc * static_cast<std::size_t>(d); });
}

inline Dims qubit_dims(int n) { return Dims(static_cast<std::size_t>(n), 2); }

inline constexpr PartyMask party_bit(int n, int party) {
  return PartyMask{1} << (n - 1 - party);
}

inline constexpr PartyMask full_mask(int n) {
  return n >= 64 ? ~PartyMask{0} : (PartyMask{1} << n) - 1;
}

inline std::vector<int> mask_members(int n, PartyMask mask) {
  std::vector<int> out;
  for (int k = 0; k < n; ++k) {
    if (mask & party_bit(n, k)) out.push_back(k);
  }
  return out;
}

inline PartyMask members_mask(int n, const std::vector<int>& members) {
  PartyMask m = 0;
  for (int k : members) {
    if (k < 0 || k >= n) throw std::invalid_argument("party index out of range");
    m |= party_bit(n, k);
  }
  return m;
}

/// Digits of a basis index in the mixed radix given by dims (party 0 most significant).
inline std::vector<int> basis_digits(std::size_t index, const Dims& dims) {
  std::vector<int> digits(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    digits[k] = static_cast<int>(index % static_cast<std::size_t>(dims[k]));
    index /= static_cast<std::size_t>(dims[k]);
  }
  return digits;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace kpart
