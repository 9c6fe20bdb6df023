#pragma once

// Inequivalent bipartitions and the pure-state factorization oracle.

#include "kpart/qstate.hpp"

#include <algorithm>
#include <numeric>

namespace kpart {

/// A subset S of the parties with 1 <= |S| <= n/2; when |S| = n/2 the
/// representative containing party 0 is used.
class Bipartition {
 public:
  Bipartition(int n, PartyMask mask) : n_(n), mask_(mask & full_mask(n)) {
    const int size = std::popcount(mask_);
    if (size < 1 || 2 * size > n) throw std::invalid_argument("Bipartition: size must be in [1, n/2]");
    if (2 * size == n && !(mask_ & party_bit(n, 0))) {
      throw std::invalid_argument("Bipartition: non-canonical half split");
    }
  }

  /// Canonical bipartition for an arbitrary proper subset (either side).
  static Bipartition canonical(int n, PartyMask side) {
    side &= full_mask(n);
    if (side == 0 || side == full_mask(n)) throw std::invalid_argument("Bipartition: improper subset");
    const PartyMask other = full_mask(n) & ~side;
    const int a = std::popcount(side);
    const int b = n - a;
    if (a < b) return Bipartition(n, side);
    if (b < a) return Bipartition(n, other);
    return Bipartition(n, (side & party_bit(n, 0)) ? side : other);
  }

  static Bipartition from_members(int n, const std::vector<int>& members) {
    return Bipartition(n, members_mask(n, members));
  }

  int n() const { return n_; }
  PartyMask mask() const { return mask_; }
  PartyMask complement() const { return full_mask(n_) & ~mask_; }
  int size() const { return std::popcount(mask_); }
  std::vector<int> members() const { return mask_members(n_, mask_); }

  friend bool operator==(const Bipartition&, const Bipartition&) = default;

 private:
  int n_;
  PartyMask mask_;
};

inline int max_bipartition_size(int n) { return n / 2; }

/// N_i: C(n,i) for i < n/2 and C(n,n/2)/2 for i = n/2.
inline std::size_t bipartition_count(int n, int i) {
  const double c = binomial(n, i);
  return static_cast<std::size_t>(2 * i == n ? c / 2 : c);
}

/// All inequivalent size-i bipartitions in lexicographic order of member lists.
inline std::vector<Bipartition> enumerate_bipartitions(int n, int i) {
  if (n < 2 || n > 63) throw std::invalid_argument("enumerate_bipartitions: n out of range");
  if (i < 1 || i > n / 2) throw std::invalid_argument("enumerate_bipartitions: i out of range");
  std::vector<Bipartition> out;
  std::vector<int> idx(static_cast<std::size_t>(i));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (2 * i != n || idx[0] == 0) out.push_back(Bipartition::from_members(n, idx));
    int p = i - 1;
    while (p >= 0 && idx[static_cast<std::size_t>(p)] == n - i + p) --p;
    if (p < 0) break;
    ++idx[static_cast<std::size_t>(p)];
    for (int q = p + 1; q < i; ++q) idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
  }
  return out;
}

inline std::vector<Bipartition> all_bipartitions(int n) {
  std::vector<Bipartition> out;
  for (int i = 1; i <= n / 2; ++i) {
    auto part = enumerate_bipartitions(n, i);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

inline constexpr double default_separability_tol = 1e-9;

/// Unit purity of the reduction to S within tol.
inline bool is_biseparable(const PureState& psi, const Bipartition& bp, double tol = default_separability_tol) {
  if (bp.n() != psi.n_parties()) throw std::invalid_argument("is_biseparable: party count mismatch");
  return reduced_purity(psi, bp.mask()) >= 1.0 - tol;
}

/// Partition of the parties into disjoint blocks.
struct Factorization {
  std::vector<std::vector<int>> blocks;

  std::size_t largest_block() const {
    std::size_t m = 0;
    for (const auto& b : blocks) m = std::max(m, b.size());
    return m;
  }
};

/// Finest block structure: parties share a block iff no biseparable cut separates them.
inline Factorization finest_factorization(const PureState& psi, double tol = default_separability_tol) {
  const int n = psi.n_parties();
  if (n == 1) return Factorization{{{0}}};
  // label[k] collects, per biseparable cut, which side party k is on.
  std::vector<std::vector<bool>> signature(static_cast<std::size_t>(n));
  for (const auto& bp : all_bipartitions(n)) {
    if (!is_biseparable(psi, bp, tol)) continue;
    for (int k = 0; k < n; ++k) signature[static_cast<std::size_t>(k)].push_back((bp.mask() & party_bit(n, k)) != 0);
  }
  Factorization f;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (int k = 0; k < n; ++k) {
    if (used[static_cast<std::size_t>(k)]) continue;
    std::vector<int> block;
    for (int j = k; j < n; ++j) {
      if (!used[static_cast<std::size_t>(j)] && signature[static_cast<std::size_t>(j)] == signature[static_cast<std::size_t>(k)]) {
        block.push_back(j);
        used[static_cast<std::size_t>(j)] = true;
      }
    }
    f.blocks.push_back(std::move(block));
  }
  return f;
}

inline int k_entanglement_pure(const PureState& psi, double tol = default_separability_tol) {
  return static_cast<int>(finest_factorization(psi, tol).largest_block());
}

/// Tensor product of block states placed on the given party groups.
inline PureState assemble_blocks(int n, const std::vector<std::vector<int>>& groups, const std::vector<PureState>& states) {
  const auto d = Eigen::Index{1} << n;
  CVector v(d);
  for (Eigen::Index x = 0; x < d; ++x) {
    cplx amp = 1.0;
    for (std::size_t b = 0; b < groups.size(); ++b) {
      std::size_t local = 0;
      for (int party : groups[b]) local = 2 * local + ((x & static_cast<Eigen::Index>(party_bit(n, party))) ? 1 : 0);
      amp *= states[b][local];
    }
    v(x) = amp;
  }
  return PureState::normalized(qubit_dims(n), std::move(v));
}

/// Haar-random states on blocks of the given sizes, parties assigned by a
/// random permutation. At most max(block_sizes)-partite entangled.
template <class Rng>
PureState random_block_state(const std::vector<int>& block_sizes, Rng& rng) {
  int n = 0;
  for (int s : block_sizes) {
    if (s < 1) throw std::invalid_argument("random_block_state: block size < 1");
    n += s;
  }
  if (n < 1 || n > 20) throw std::invalid_argument("random_block_state: n out of range");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<int>> groups;
  std::vector<PureState> states;
  std::size_t pos = 0;
  for (int s : block_sizes) {
    std::vector<int> g(perm.begin() + static_cast<std::ptrdiff_t>(pos), perm.begin() + static_cast<std::ptrdiff_t>(pos + static_cast<std::size_t>(s)));
    std::sort(g.begin(), g.end());
    groups.push_back(std::move(g));
    states.push_back(haar_state(qubit_dims(s), rng));
    pos += static_cast<std::size_t>(s);
  }
  return assemble_blocks(n, groups, states);
}

/// Integer partitions of n with all parts <= max_part, parts in nonincreasing order.
inline std::vector<std::vector<int>> integer_partitions(int n, int max_part) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining, int cap) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int p = std::min(remaining, cap); p >= 1; --p) {
      cur.push_back(p);
      self(self, remaining - p, p);
      cur.pop_back();
    }
  };
  if (n >= 1 && max_part >= 1) rec(rec, n, max_part);
  return out;
}

}  // namespace kpart
