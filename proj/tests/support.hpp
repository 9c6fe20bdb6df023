#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include "kpart/baselines.hpp"
#include "kpart/dynamics.hpp"

#include <random>

namespace kpart::testing {

using Rng = std::mt19937_64;

inline CVector normal_vector(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> g;
  CVector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = cplx(g(rng), g(rng));
  return v;
}

/// Ginibre density matrix G G^dagger / tr with rank r (full rank by default).
inline DensityOperator ginibre_density(const Dims& dims, Rng& rng, int rank = 0) {
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  const Eigen::Index r = rank > 0 ? rank : d;
  CMatrix g(d, r);
  for (Eigen::Index c = 0; c < r; ++c) g.col(c) = normal_vector(d, rng);
  CMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityOperator::from_dense(dims, m);
}

inline PureState random_pure(const Dims& dims, Rng& rng) {
  return PureState::normalized(dims, normal_vector(static_cast<Eigen::Index>(total_dim(dims)), rng));
}

inline Probe random_probe(int n, Rng& rng) { return probe_from_angles(random_probe_angles(n, rng), n); }

inline std::vector<CVector> random_factors(int n, Rng& rng) {
  std::vector<CVector> f;
  for (int k = 0; k < n; ++k) f.push_back(normal_vector(2, rng).normalized());
  return f;
}

inline PureState product_state(const std::vector<CVector>& factors) {
  CVector v = CVector::Ones(1);
  for (const auto& f : factors) {
    CVector next(v.size() * f.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) next.segment(i * f.size(), f.size()) = v(i) * f;
    v = next;
  }
  return PureState::normalized(qubit_dims(static_cast<int>(factors.size())), v);
}

/// GHZ states on consecutive blocks of the given sizes.
inline PureState ghz_blocks(const std::vector<int>& sizes) {
  std::vector<std::vector<int>> groups;
  std::vector<PureState> states;
  int next = 0;
  for (int s : sizes) {
    std::vector<int> g;
    for (int i = 0; i < s; ++i) g.push_back(next++);
    groups.push_back(g);
    CVector v = CVector::Zero(Eigen::Index{1} << s);
    v(0) = v((Eigen::Index{1} << s) - 1) = 1.0;
    states.push_back(PureState::normalized(qubit_dims(s), v));
  }
  return assemble_blocks(next, groups, states);
}

/// Probe pairing |0...0> with |1...1>.
inline Probe all_zero_one_probe(int n) {
  CVector z(2), o(2);
  z << 1.0, 0.0;
  o << 0.0, 1.0;
  return Probe{ProductVector::uniform(n, z), ProductVector::uniform(n, o)};
}

}  // namespace kpart::testing
