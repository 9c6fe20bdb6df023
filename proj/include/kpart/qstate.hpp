#pragma once

// States, operators and expectation machinery for n-party systems.
//
// Basis encoding: party 0 is the most significant digit of a basis index,
// so for qubits |x_0 x_1 ... x_{n-1}> has index sum_k x_k 2^(n-1-k).

#include "kpart/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <utility>

namespace kpart {

class PureState;
PureState make_graph_state(const std::vector<std::vector<int>>& adjacency, int n);

class PureState {
 public:
  /// Takes ownership of amplitudes; squared norm must be 1 within 1e-12.
  PureState(Dims dims, CVector amplitudes) : dims_(std::move(dims)), amps_(std::move(amplitudes)) {
    check_shape();
    if (std::abs(amps_.squaredNorm() - 1.0) > 1e-12) {
      throw std::invalid_argument("PureState: amplitudes are not normalized");
    }
  }

  static PureState normalized(Dims dims, CVector amplitudes) {
    const double norm = amplitudes.norm();
    if (norm == 0.0 || !std::isfinite(norm)) throw std::invalid_argument("PureState: zero vector");
    amplitudes /= norm;
    return PureState(std::move(dims), std::move(amplitudes));
  }

  static PureState basis(Dims dims, std::size_t index) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(total_dim(dims)));
    if (index >= static_cast<std::size_t>(v.size())) throw std::invalid_argument("basis index out of range");
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(dims), std::move(v));
  }

  int n_parties() const { return static_cast<int>(dims_.size()); }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  cplx operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

  /// True when the state was built as a fully connected graph state; enables
  /// the O(n^2) product-overlap path.
  bool is_complete_graph() const { return complete_graph_; }

  bool all_qubits() const {
    return std::all_of(dims_.begin(), dims_.end(), [](int d) { return d == 2; });
  }

 private:
  friend PureState make_graph_state(const std::vector<std::vector<int>>&, int);

  void check_shape() const {
    if (dims_.empty()) throw std::invalid_argument("PureState: no parties");
    for (int d : dims_) {
      if (d < 1) throw std::invalid_argument("PureState: local dimension < 1");
    }
    if (total_dim(dims_) != static_cast<std::size_t>(amps_.size())) {
      throw std::invalid_argument("PureState: amplitude length does not match dims");
    }
  }

  Dims dims_;
  CVector amps_;
  bool complete_graph_ = false;
};

/// Tensor product of normalized local vectors.
class ProductVector {
 public:
  ProductVector() = default;

  explicit ProductVector(std::vector<CVector> factors) : factors_(std::move(factors)) {
    for (const auto& f : factors_) {
      if (f.size() < 1) throw std::invalid_argument("ProductVector: empty factor");
      if (std::abs(f.squaredNorm() - 1.0) > 1e-12) {
        throw std::invalid_argument("ProductVector: factor is not normalized");
      }
    }
  }

  static ProductVector normalized(std::vector<CVector> factors) {
    for (auto& f : factors) {
      const double norm = f.norm();
      if (norm == 0.0) throw std::invalid_argument("ProductVector: zero factor");
      f /= norm;
    }
    return ProductVector(std::move(factors));
  }

  /// Same local vector on every party.
  static ProductVector uniform(int n, const CVector& local) {
    return normalized(std::vector<CVector>(static_cast<std::size_t>(n), local));
  }

  /// Computational basis product |x_0 ... x_{n-1}>.
  static ProductVector basis(const Dims& dims, std::size_t index) {
    auto digits = basis_digits(index, dims);
    std::vector<CVector> f;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      CVector v = CVector::Zero(dims[k]);
      v(digits[k]) = 1.0;
      f.push_back(std::move(v));
    }
    return ProductVector(std::move(f));
  }

  int n_parties() const { return static_cast<int>(factors_.size()); }
  const CVector& factor(int k) const { return factors_[static_cast<std::size_t>(k)]; }
  const std::vector<CVector>& factors() const { return factors_; }

  Dims dims() const {
    Dims d;
    for (const auto& f : factors_) d.push_back(static_cast<int>(f.size()));
    return d;
  }

  CVector expand() const {
    CVector v = CVector::Ones(1);
    for (const auto& f : factors_) {
      CVector next(v.size() * f.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        next.segment(i * f.size(), f.size()) = v(i) * f;
      }
      v = std::move(next);
    }
    return v;
  }

  PureState to_state() const { return PureState::normalized(dims(), expand()); }

 private:
  std::vector<CVector> factors_;
};

/// Sign pattern of Z on the parties in mask, applied to a qubit amplitude vector.
inline CVector apply_z_mask(const CVector& amps, int n, PartyMask mask) {
  if (mask == 0) return amps;
  CVector out = amps;
  for (Eigen::Index x = 0; x < out.size(); ++x) {
    if (std::popcount(static_cast<PartyMask>(x) & mask) & 1) out(x) = -out(x);
  }
  (void)n;
  return out;
}

namespace detail {

inline void require_qubits_for_mask(const Dims& dims, PartyMask mask) {
  const int n = static_cast<int>(dims.size());
  for (int k = 0; k < n; ++k) {
    if ((mask & party_bit(n, k)) && dims[static_cast<std::size_t>(k)] != 2) {
      throw std::invalid_argument("Z mask on a non-qubit party");
    }
  }
}

inline CVector z_flipped(const CVector& f) {
  CVector g = f;
  g(1) = -g(1);
  return g;
}

}  // namespace detail

/// <bra|psi> by sequential contraction from the last party, O(dim).
inline cplx overlap_generic(const ProductVector& bra, const PureState& psi, PartyMask z_mask = 0) {
  const int n = psi.n_parties();
  if (bra.dims() != psi.dims()) throw std::invalid_argument("overlap: dimension mismatch");
  detail::require_qubits_for_mask(psi.dims(), z_mask);
  std::vector<cplx> v(psi.amplitudes().data(), psi.amplitudes().data() + psi.dim());
  std::size_t len = v.size();
  for (int k = n - 1; k >= 0; --k) {
    CVector f = bra.factor(k);
    if (z_mask & party_bit(n, k)) f = detail::z_flipped(f);
    const auto d = static_cast<std::size_t>(f.size());
    const std::size_t next = len / d;
    for (std::size_t p = 0; p < next; ++p) {
      cplx acc = 0.0;
      for (std::size_t b = 0; b < d; ++b) acc += std::conj(f(static_cast<Eigen::Index>(b))) * v[p * d + b];
      v[p] = acc;
    }
    len = next;
  }
  return v[0];
}

/// <bra|G> for the fully connected qubit graph state, O(n^2): the amplitude of G
/// on a weight-w string is 2^{-n/2} (-1)^{w(w-1)/2}, so the overlap is a signed
/// sum of the elementary symmetric coefficients of prod_k (conj a_k0 + z conj a_k1).
inline cplx overlap_complete_graph(const ProductVector& bra, int n, PartyMask z_mask = 0) {
  std::vector<cplx> coeff(static_cast<std::size_t>(n) + 1, 0.0);
  coeff[0] = 1.0;
  for (int k = 0; k < n; ++k) {
    const CVector& f = bra.factor(k);
    if (f.size() != 2) throw std::invalid_argument("clique overlap requires qubits");
    const cplx a0 = std::conj(f(0));
    const cplx a1 = (z_mask & party_bit(n, k)) ? -std::conj(f(1)) : std::conj(f(1));
    for (int w = k + 1; w >= 1; --w) coeff[static_cast<std::size_t>(w)] = a0 * coeff[static_cast<std::size_t>(w)] + a1 * coeff[static_cast<std::size_t>(w - 1)];
    coeff[0] *= a0;
  }
  cplx acc = 0.0;
  for (int w = 0; w <= n; ++w) {
    const bool negative = ((w * (w - 1) / 2) & 1) != 0;
    acc += negative ? -coeff[static_cast<std::size_t>(w)] : coeff[static_cast<std::size_t>(w)];
  }
  return acc * std::pow(2.0, -0.5 * n);
}

/// <bra| Z_mask |psi>.
inline cplx overlap(const ProductVector& bra, const PureState& psi, PartyMask z_mask = 0) {
  if (psi.is_complete_graph()) {
    if (bra.dims() != psi.dims()) throw std::invalid_argument("overlap: dimension mismatch");
    return overlap_complete_graph(bra, psi.n_parties(), z_mask);
  }
  return overlap_generic(bra, psi, z_mask);
}

/// One weighted pure component Z_mask|state>. Weight may be negative only in
/// internal spectral views, never inside a DensityOperator.
struct EnsembleMember {
  double weight = 0.0;
  std::shared_ptr<const PureState> state;
  PartyMask z_mask = 0;

  CVector amplitudes() const { return apply_z_mask(state->amplitudes(), state->n_parties(), z_mask); }
};

class DensityOperator {
 public:
  enum class Kind { dense, ensemble };

  /// Hermitian within 1e-10, unit trace within 1e-10, smallest eigenvalue >= -1e-10.
  static DensityOperator from_dense(Dims dims, CMatrix m) {
    const auto d = static_cast<Eigen::Index>(total_dim(dims));
    if (m.rows() != d || m.cols() != d) throw std::invalid_argument("DensityOperator: shape mismatch");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
      throw std::invalid_argument("DensityOperator: matrix is not Hermitian");
    }
    if (std::abs(m.trace() - cplx(1.0)) > 1e-10) throw std::invalid_argument("DensityOperator: trace != 1");
    CMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw std::invalid_argument("DensityOperator: not positive");
    DensityOperator r;
    r.kind_ = Kind::dense;
    r.dims_ = std::move(dims);
    r.matrix_ = std::move(h);
    return r;
  }

  static DensityOperator from_ensemble(Dims dims, std::vector<EnsembleMember> members) {
    if (members.empty()) throw std::invalid_argument("DensityOperator: empty ensemble");
    double total = 0.0;
    for (const auto& m : members) {
      if (!m.state) throw std::invalid_argument("DensityOperator: null member");
      if (m.state->dims() != dims) throw std::invalid_argument("DensityOperator: member dims mismatch");
      if (m.weight < 0.0) throw std::invalid_argument("DensityOperator: negative weight");
      detail::require_qubits_for_mask(dims, m.z_mask);
      total += m.weight;
    }
    if (std::abs(total - 1.0) > 1e-10) throw std::invalid_argument("DensityOperator: weights do not sum to 1");
    DensityOperator r;
    r.kind_ = Kind::ensemble;
    r.dims_ = std::move(dims);
    r.members_ = std::move(members);
    return r;
  }

  static DensityOperator from_pure(const PureState& psi) {
    return from_ensemble(psi.dims(), {EnsembleMember{1.0, std::make_shared<const PureState>(psi), 0}});
  }

  Kind kind() const { return kind_; }
  bool is_dense() const { return kind_ == Kind::dense; }
  const Dims& dims() const { return dims_; }
  int n_parties() const { return static_cast<int>(dims_.size()); }
  std::size_t dim() const { return total_dim(dims_); }

  const CMatrix& matrix() const {
    if (kind_ != Kind::dense) throw std::logic_error("DensityOperator: not dense");
    return matrix_;
  }
  const std::vector<EnsembleMember>& members() const {
    if (kind_ != Kind::ensemble) throw std::logic_error("DensityOperator: not an ensemble");
    return members_;
  }

  CMatrix to_dense() const {
    if (kind_ == Kind::dense) return matrix_;
    const auto d = static_cast<Eigen::Index>(dim());
    CMatrix m = CMatrix::Zero(d, d);
    for (const auto& mem : members_) {
      CVector v = mem.amplitudes();
      m.noalias() += mem.weight * v * v.adjoint();
    }
    return m;
  }

  DensityOperator as_dense() const { return kind_ == Kind::dense ? *this : from_dense(dims_, to_dense()); }

  double purity() const {
    if (kind_ == Kind::dense) return matrix_.cwiseAbs2().sum();
    double p = 0.0;
    std::vector<CVector> amps;
    for (const auto& m : members_) amps.push_back(m.amplitudes());
    for (std::size_t a = 0; a < members_.size(); ++a) {
      for (std::size_t b = 0; b < members_.size(); ++b) {
        p += members_[a].weight * members_[b].weight * std::norm(amps[a].dot(amps[b]));
      }
    }
    return p;
  }

 private:
  DensityOperator() = default;

  Kind kind_ = Kind::dense;
  Dims dims_;
  CMatrix matrix_;
  std::vector<EnsembleMember> members_;
};

/// <bra|rho|ket>.
inline cplx matrix_element(const DensityOperator& rho, const ProductVector& bra, const ProductVector& ket) {
  if (bra.dims() != rho.dims() || ket.dims() != rho.dims()) {
    throw std::invalid_argument("matrix_element: dimension mismatch");
  }
  if (rho.is_dense()) {
    const CVector b = bra.expand();
    const CVector k = ket.expand();
    return b.dot(rho.matrix() * k);
  }
  cplx acc = 0.0;
  for (const auto& m : rho.members()) {
    acc += m.weight * overlap(bra, *m.state, m.z_mask) * std::conj(overlap(ket, *m.state, m.z_mask));
  }
  return acc;
}

class Operator {
 public:
  Operator(Dims dims, CMatrix m, bool hermitian) : dims_(std::move(dims)), m_(std::move(m)), hermitian_(hermitian) {
    const auto d = static_cast<Eigen::Index>(total_dim(dims_));
    if (m_.rows() != d || m_.cols() != d) throw std::invalid_argument("Operator: shape mismatch");
    if (hermitian_ && (m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
      throw std::invalid_argument("Operator: flagged Hermitian but is not");
    }
  }

  const CMatrix& matrix() const { return m_; }
  const Dims& dims() const { return dims_; }
  int n_parties() const { return static_cast<int>(dims_.size()); }
  bool hermitian() const { return hermitian_; }

 private:
  Dims dims_;
  CMatrix m_;
  bool hermitian_;
};

enum class Axis { x, y, z };

inline Eigen::Matrix2cd pauli(Axis a) {
  Eigen::Matrix2cd s;
  switch (a) {
    case Axis::x: s << 0, 1, 1, 0; break;
    case Axis::y: s << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case Axis::z: s << 1, 0, 0, -1; break;
  }
  return s;
}

/// Adds coeff * (op on party k) to out, for an n-qubit register.
inline void add_single_site(CMatrix& out, int n, int k, const Eigen::Matrix2cd& op, cplx coeff) {
  const auto d = out.rows();
  const Eigen::Index bit = Eigen::Index{1} << (n - 1 - k);
  for (Eigen::Index x = 0; x < d; ++x) {
    const int xk = (x & bit) ? 1 : 0;
    for (int yk = 0; yk < 2; ++yk) {
      const cplx e = op(yk, xk);
      if (e == cplx(0.0)) continue;
      const Eigen::Index y = yk ? (x | bit) : (x & ~bit);
      out(y, x) += coeff * e;
    }
  }
}

/// J_axis = (1/2) sum_k sigma_axis^(k).
inline Operator collective_op(int n, Axis axis) {
  if (n < 1) throw std::invalid_argument("collective_op: n < 1");
  const auto d = Eigen::Index{1} << n;
  CMatrix m = CMatrix::Zero(d, d);
  const auto s = pauli(axis);
  for (int k = 0; k < n; ++k) add_single_site(m, n, k, s, 0.5);
  return Operator(qubit_dims(n), std::move(m), true);
}

inline double expectation(const DensityOperator& rho, const Operator& op) {
  if (!op.hermitian()) throw std::invalid_argument("expectation: operator is not Hermitian");
  if (op.dims() != rho.dims()) throw std::invalid_argument("expectation: dimension mismatch");
  if (rho.is_dense()) return (rho.matrix().transpose().cwiseProduct(op.matrix())).sum().real();
  double acc = 0.0;
  for (const auto& m : rho.members()) {
    const CVector v = m.amplitudes();
    acc += m.weight * v.dot(op.matrix() * v).real();
  }
  return acc;
}

inline double variance(const DensityOperator& rho, const Operator& op) {
  const double mean = expectation(rho, op);
  const Operator sq(op.dims(), op.matrix() * op.matrix(), true);
  return expectation(rho, sq) - mean * mean;
}

/// exp(-i angle J_axis) on n qubits, as a Kronecker product of local rotations.
inline CMatrix collective_rotation(int n, Axis axis, double angle) {
  const Eigen::Matrix2cd local = std::cos(angle / 2) * Eigen::Matrix2cd::Identity() -
                                 cplx(0, std::sin(angle / 2)) * pauli(axis);
  CMatrix u = CMatrix::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    CMatrix next(u.rows() * 2, u.cols() * 2);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) next.block(r * u.rows(), c * u.cols(), u.rows(), u.cols()) = u * local(r, c);
    }
    u = std::move(next);
  }
  return u;
}

inline DensityOperator rotate(const DensityOperator& rho, Axis axis, double angle) {
  for (int d : rho.dims()) {
    if (d != 2) throw std::invalid_argument("rotate: qubits only");
  }
  const CMatrix u = collective_rotation(rho.n_parties(), axis, angle);
  CMatrix r = u * rho.to_dense() * u.adjoint();
  r = 0.5 * (r + r.adjoint());
  return DensityOperator::from_dense(rho.dims(), std::move(r));
}

/// Base-2 entropy over eigenvalues >= 1e-14.
inline double von_neumann_entropy(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.to_dense(), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l >= 1e-14) s -= l * std::log2(l);
  }
  return s;
}

namespace detail {

/// psi reshaped as a (subset) x (complement) matrix.
inline CMatrix bipartite_matrix(const PureState& psi, PartyMask subset) {
  const int n = psi.n_parties();
  const auto& dims = psi.dims();
  std::size_t ds = 1, dc = 1;
  for (int k = 0; k < n; ++k) (subset & party_bit(n, k) ? ds : dc) *= static_cast<std::size_t>(dims[static_cast<std::size_t>(k)]);
  CMatrix m(static_cast<Eigen::Index>(ds), static_cast<Eigen::Index>(dc));
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  for (std::size_t x = 0; x < psi.dim(); ++x) {
    std::size_t r = 0, c = 0;
    for (int k = 0; k < n; ++k) {
      const auto d = static_cast<std::size_t>(dims[static_cast<std::size_t>(k)]);
      if (subset & party_bit(n, k)) r = r * d + static_cast<std::size_t>(digits[static_cast<std::size_t>(k)]);
      else c = c * d + static_cast<std::size_t>(digits[static_cast<std::size_t>(k)]);
    }
    m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = psi[x];
    for (int k = n - 1; k >= 0; --k) {
      if (++digits[static_cast<std::size_t>(k)] < dims[static_cast<std::size_t>(k)]) break;
      digits[static_cast<std::size_t>(k)] = 0;
    }
  }
  return m;
}

}  // namespace detail

/// Partial trace of |psi><psi| over the complement of subset.
inline DensityOperator reduced_density(const PureState& psi, PartyMask subset) {
  const int n = psi.n_parties();
  subset &= full_mask(n);
  if (subset == 0 || subset == full_mask(n)) throw std::invalid_argument("reduced_density: empty or full subset");
  const CMatrix m = detail::bipartite_matrix(psi, subset);
  Dims sub;
  for (int k = 0; k < n; ++k) {
    if (subset & party_bit(n, k)) sub.push_back(psi.dims()[static_cast<std::size_t>(k)]);
  }
  CMatrix r = m * m.adjoint();
  r = 0.5 * (r + r.adjoint());
  r /= r.trace().real();
  return DensityOperator::from_dense(std::move(sub), std::move(r));
}

/// Tr(rho_S^2) for the reduction of psi to subset, without building rho_S twice.
inline double reduced_purity(const PureState& psi, PartyMask subset) {
  const CMatrix m = detail::bipartite_matrix(psi, subset);
  if (m.rows() <= m.cols()) return (m * m.adjoint()).cwiseAbs2().sum();
  return (m.adjoint() * m).cwiseAbs2().sum();
}

inline PureState make_w_state(int n, std::span<const cplx> coefficients) {
  if (n < 1 || coefficients.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("make_w_state: need n coefficients");
  }
  CVector v = CVector::Zero(Eigen::Index{1} << n);
  for (int k = 0; k < n; ++k) v(static_cast<Eigen::Index>(party_bit(n, k))) = coefficients[static_cast<std::size_t>(k)];
  if (v.norm() == 0.0) throw std::invalid_argument("make_w_state: all coefficients zero");
  return PureState::normalized(qubit_dims(n), std::move(v));
}

inline PureState make_w_state(int n) {
  std::vector<cplx> c(static_cast<std::size_t>(n), 1.0);
  return make_w_state(n, c);
}

/// (prod_{(i,j) in E} CZ_ij) |+>^n. Amplitude on x is 2^{-n/2} (-1)^{#edges inside supp(x)}.
inline PureState make_graph_state(const std::vector<std::vector<int>>& adjacency, int n) {
  if (n < 1 || adjacency.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("make_graph_state: bad size");
  bool complete = true;
  for (int i = 0; i < n; ++i) {
    if (adjacency[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("make_graph_state: adjacency is not square");
    }
    for (int j = 0; j < n; ++j) {
      const int a = adjacency[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (a != 0 && a != 1) throw std::invalid_argument("make_graph_state: entries must be 0/1");
      if (a != adjacency[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
        throw std::invalid_argument("make_graph_state: adjacency is not symmetric");
      }
      if (i == j && a != 0) throw std::invalid_argument("make_graph_state: nonzero diagonal");
      if (i != j && a == 0) complete = false;
    }
  }
  const auto d = Eigen::Index{1} << n;
  CVector v(d);
  const double amp = std::pow(2.0, -0.5 * n);
  for (Eigen::Index x = 0; x < d; ++x) {
    int edges = 0;
    for (int i = 0; i < n; ++i) {
      if (!(x & static_cast<Eigen::Index>(party_bit(n, i)))) continue;
      for (int j = i + 1; j < n; ++j) {
        if ((x & static_cast<Eigen::Index>(party_bit(n, j))) && adjacency[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) ++edges;
      }
    }
    v(x) = (edges & 1) ? -amp : amp;
  }
  PureState s(qubit_dims(n), std::move(v));
  s.complete_graph_ = complete && n >= 2;
  return s;
}

inline std::vector<std::vector<int>> complete_graph(int n) {
  std::vector<std::vector<int>> a(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 1));
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 0;
  return a;
}

/// |+>^n, the +n/2 eigenstate of J_x.
inline PureState coherent_x_state(int n) {
  const auto d = Eigen::Index{1} << n;
  return PureState(qubit_dims(n), CVector::Constant(d, std::pow(2.0, -0.5 * n)));
}

/// exp(-i chi J_z^2) |+>^n; J_z^2 is diagonal so this is a per-basis phase.
inline PureState make_spin_squeezed(int n, double chi) {
  if (n < 1) throw std::invalid_argument("make_spin_squeezed: n < 1");
  const auto d = Eigen::Index{1} << n;
  CVector v(d);
  const double amp = std::pow(2.0, -0.5 * n);
  for (Eigen::Index x = 0; x < d; ++x) {
    const double m = 0.5 * n - std::popcount(static_cast<std::uint64_t>(x));
    v(x) = amp * std::exp(cplx(0, -chi * m * m));
  }
  return PureState(qubit_dims(n), std::move(v));
}

/// q rho + (1 - q) 1/dim.
inline DensityOperator werner_mix(const DensityOperator& rho, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("werner_mix: q outside [0,1]");
  const auto d = static_cast<Eigen::Index>(rho.dim());
  CMatrix m = q * rho.to_dense();
  m.diagonal().array() += (1.0 - q) / static_cast<double>(d);
  return DensityOperator::from_dense(rho.dims(), std::move(m));
}

inline DensityOperator werner_mix(const PureState& psi, double q) {
  return werner_mix(DensityOperator::from_pure(psi), q);
}

/// q |psi><psi| + (1 - q) P / dim(P), P the projector onto span(basis).
inline DensityOperator werner_mix_subspace(const PureState& psi, double q, std::span<const PureState> basis) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("werner_mix_subspace: q outside [0,1]");
  if (basis.empty()) throw std::invalid_argument("werner_mix_subspace: empty basis");
  CMatrix m = q * psi.amplitudes() * psi.amplitudes().adjoint();
  const double w = (1.0 - q) / static_cast<double>(basis.size());
  for (const auto& b : basis) {
    if (b.dims() != psi.dims()) throw std::invalid_argument("werner_mix_subspace: dims differ");
    m += w * b.amplitudes() * b.amplitudes().adjoint();
  }
  return DensityOperator::from_dense(psi.dims(), std::move(m));
}

inline DensityOperator maximally_mixed(const Dims& dims) {
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  return DensityOperator::from_dense(dims, CMatrix::Identity(d, d) / static_cast<double>(d));
}

/// Complex Gaussian vector normalized: Haar-distributed pure state.
template <class Rng>
PureState haar_state(const Dims& dims, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(static_cast<Eigen::Index>(total_dim(dims)));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
  return PureState::normalized(dims, std::move(v));
}

/// A A^dagger / Tr(A A^dagger) on the span of basis, with A's real and imaginary
/// parts independently Normal(mean, sigma^2) and the diagonal of A A^dagger
/// multiplied by diag_boost before normalization.
template <class Rng>
DensityOperator random_density(std::span<const PureState> basis, double mean, double sigma, double diag_boost, Rng& rng) {
  if (basis.empty()) throw std::invalid_argument("random_density: empty basis");
  if (!(sigma > 0.0)) throw std::invalid_argument("random_density: sigma must be positive");
  if (diag_boost < 1.0) throw std::invalid_argument("random_density: diag_boost < 1");
  const auto d = static_cast<Eigen::Index>(basis.size());
  const Dims& dims = basis[0].dims();
  CMatrix b(static_cast<Eigen::Index>(basis[0].dim()), d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (basis[static_cast<std::size_t>(i)].dims() != dims) throw std::invalid_argument("random_density: basis dims differ");
    b.col(i) = basis[static_cast<std::size_t>(i)].amplitudes();
  }
  if ((b.adjoint() * b - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("random_density: basis is not orthonormal");
  }
  std::normal_distribution<double> g(mean, sigma);
  CMatrix a(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      const double re = g(rng);
      const double im = g(rng);
      a(r, c) = cplx(re, im);
    }
  }
  CMatrix m = a * a.adjoint();
  m.diagonal() *= diag_boost;
  m = 0.5 * (m + m.adjoint());
  m /= m.trace().real();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12) throw positivity_error("random_density: boosted matrix is not positive");
  CMatrix full = b * m * b.adjoint();
  full = 0.5 * (full + full.adjoint());
  return DensityOperator::from_dense(dims, std::move(full));
}

/// The n single-excitation basis states |1 0 ... 0>, ..., |0 ... 0 1>.
inline std::vector<PureState> single_excitation_basis(int n) {
  std::vector<PureState> out;
  for (int k = 0; k < n; ++k) out.push_back(PureState::basis(qubit_dims(n), static_cast<std::size_t>(party_bit(n, k))));
  return out;
}

}  // namespace kpart
