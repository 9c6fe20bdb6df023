#pragma once

// Evaluation of the k-partite criteria
//
//   tau_{k,n}(rho) = f(rho) - sum_i a_i sum_{S : |S| = i} f_S(rho)
//
// with f = |<phi1|rho|phi2>| and f_S = sqrt(<chi1|rho|chi1><chi2|rho|chi2>),
// where (chi1, chi2) is the probe pair (phi1, phi2) with the factors of the
// parties in S exchanged. A positive value certifies at least k-partite
// entanglement when a is a sound weight vector for (k, n).

#include "kpart/partitions.hpp"
#include "kpart/simplex.hpp"
#include "kpart/weights.hpp"

#include <Eigen/SVD>

#include <limits>
#include <optional>

namespace kpart {

/// The two copy factors of the separable probe on the doubled space.
struct Probe {
  ProductVector phi1;
  ProductVector phi2;

  int n_parties() const { return phi1.n_parties(); }
};

/// (cos(theta/2), e^{i phi} sin(theta/2)).
inline CVector qubit_factor(double theta, double phi) {
  CVector v(2);
  v(0) = std::cos(theta / 2);
  v(1) = std::polar(1.0, phi) * std::sin(theta / 2);
  return v;
}

/// angles = (theta, phi) per party for phi1, then the same for phi2; 4n values.
inline Probe probe_from_angles(std::span<const double> angles, int n) {
  if (angles.size() != static_cast<std::size_t>(4 * n)) throw std::invalid_argument("probe_from_angles: need 4n angles");
  std::vector<CVector> a, b;
  for (int k = 0; k < n; ++k) {
    a.push_back(qubit_factor(angles[static_cast<std::size_t>(2 * k)], angles[static_cast<std::size_t>(2 * k + 1)]));
    b.push_back(qubit_factor(angles[static_cast<std::size_t>(2 * n + 2 * k)], angles[static_cast<std::size_t>(2 * n + 2 * k + 1)]));
  }
  return Probe{ProductVector(std::move(a)), ProductVector(std::move(b))};
}

/// Inverse of probe_from_angles up to per-factor global phases.
inline std::vector<double> probe_angles(const Probe& p) {
  std::vector<double> out;
  for (const auto* pv : {&p.phi1, &p.phi2}) {
    for (const auto& f : pv->factors()) {
      if (f.size() != 2) throw std::invalid_argument("probe_angles: qubit factors only");
      out.push_back(2.0 * std::atan2(std::abs(f(1)), std::abs(f(0))));
      out.push_back(std::abs(f(1)) > 0 && std::abs(f(0)) > 0 ? std::arg(f(1)) - std::arg(f(0)) : std::arg(f(1)));
    }
  }
  return out;
}

/// (chi1, chi2): chi1 takes phi2's factor on S and phi1's elsewhere, chi2 the reverse.
inline std::pair<ProductVector, ProductVector> swap_probe_mask(const Probe& probe, PartyMask s) {
  const int n = probe.n_parties();
  std::vector<CVector> c1, c2;
  for (int k = 0; k < n; ++k) {
    const bool in = (s & party_bit(n, k)) != 0;
    c1.push_back(in ? probe.phi2.factor(k) : probe.phi1.factor(k));
    c2.push_back(in ? probe.phi1.factor(k) : probe.phi2.factor(k));
  }
  return {ProductVector(std::move(c1)), ProductVector(std::move(c2))};
}

inline std::pair<ProductVector, ProductVector> swap_probe(const Probe& probe, const Bipartition& bp) {
  return swap_probe_mask(probe, bp.mask());
}

/// |<phi1|rho|phi2>|: the root of <Phi|Pi rho (x) rho|Phi> for the product probe.
inline double f_global(const DensityOperator& rho, const Probe& probe) {
  return std::abs(matrix_element(rho, probe.phi1, probe.phi2));
}

namespace detail {

inline double clipped_diagonal(double v) {
  if (v < -1e-12) throw positivity_error("diagonal matrix element below -1e-12");
  return std::max(v, 0.0);
}

}  // namespace detail

inline double f_bipartition(const DensityOperator& rho, const Probe& probe, const Bipartition& bp) {
  const auto [c1, c2] = swap_probe(probe, bp);
  const double a = detail::clipped_diagonal(matrix_element(rho, c1, c1).real());
  const double b = detail::clipped_diagonal(matrix_element(rho, c2, c2).real());
  return std::sqrt(a * b);
}

struct TauResult {
  double value = 0.0;
  double f_value = 0.0;
  std::vector<std::pair<Bipartition, double>> contributions;
  WeightVector weights;
  Probe probe;
  /// Probe angles when the probe came from the optimizer (4n values), else empty.
  std::vector<double> angles;
  std::size_t evaluations = 0;
};

inline void check_weights_for(const DensityOperator& rho, const WeightVector& w) {
  w.validate();
  if (w.n != rho.n_parties()) throw std::invalid_argument("weights do not match the party count");
}

/// Direct evaluation through matrix elements, one bipartition at a time.
inline TauResult tau(const DensityOperator& rho, const WeightVector& weights, const Probe& probe) {
  check_weights_for(rho, weights);
  TauResult r;
  r.weights = weights;
  r.probe = probe;
  r.f_value = f_global(rho, probe);
  double penalty = 0.0;
  for (int i = 1; i <= weights.n / 2; ++i) {
    const double a = weights(i);
    if (a <= 0.0) continue;
    for (const auto& bp : enumerate_bipartitions(weights.n, i)) {
      const double c = f_bipartition(rho, probe, bp);
      r.contributions.emplace_back(bp, c);
      penalty += a * c;
    }
  }
  r.value = r.f_value - penalty;
  return r;
}

/// rho written as sum_m w_m Z_m|psi_m><psi_m|Z_m + c * identity. Dense inputs
/// are diagonalized and the smallest eigenvalue is moved into c.
struct MixtureView {
  Dims dims;
  std::vector<EnsembleMember> components;
  double identity_weight = 0.0;

  int n_parties() const { return static_cast<int>(dims.size()); }
};

inline MixtureView mixture_view(const DensityOperator& rho) {
  MixtureView v;
  v.dims = rho.dims();
  if (!rho.is_dense()) {
    v.components = rho.members();
    return v;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  const auto& ev = es.eigenvalues();
  const double shift = std::max(ev(0), 0.0);
  v.identity_weight = shift;
  for (Eigen::Index i = ev.size(); i-- > 0;) {
    const double w = ev(i) - shift;
    if (std::abs(w) <= 1e-14) continue;
    v.components.push_back(EnsembleMember{
        w, std::make_shared<const PureState>(PureState::normalized(rho.dims(), es.eigenvectors().col(i))), 0});
  }
  return v;
}

/// The quantities every criterion at a fixed probe is built from.
struct ProbeMoments {
  int n = 0;
  /// <phi1|rho|phi2>
  cplx off = 0.0;
  /// diag[S] = <chi1^S|rho|chi1^S>, chi1^S carrying phi2's factors on S.
  /// <chi2^S|rho|chi2^S> = diag[complement of S].
  std::vector<double> diag;
};

namespace detail {

/// T[S] = <chi1^S| Z_mask |psi> for every subset S: applies the 2 x d_k map
/// rows (u0_k^dagger, u1_k^dagger) on every party.
inline void subset_overlaps(const CVector& amps, const Dims& dims, const std::vector<CVector>& u0,
                            const std::vector<CVector>& u1, PartyMask z_mask, std::vector<cplx>& out,
                            std::vector<cplx>& scratch) {
  const int n = static_cast<int>(dims.size());
  out.assign(amps.data(), amps.data() + amps.size());
  std::size_t prefix = out.size();  // product of physical dims of parties < k, times d_k
  std::size_t choices = 1;          // 2^(n-1-k)
  for (int k = n - 1; k >= 0; --k) {
    const auto d = static_cast<std::size_t>(dims[static_cast<std::size_t>(k)]);
    prefix /= d;
    const bool flip = (z_mask & party_bit(n, k)) != 0;
    if (d == 2) {
      const cplx a00 = std::conj(u0[static_cast<std::size_t>(k)](0));
      const cplx a01 = flip ? -std::conj(u0[static_cast<std::size_t>(k)](1)) : std::conj(u0[static_cast<std::size_t>(k)](1));
      const cplx a10 = std::conj(u1[static_cast<std::size_t>(k)](0));
      const cplx a11 = flip ? -std::conj(u1[static_cast<std::size_t>(k)](1)) : std::conj(u1[static_cast<std::size_t>(k)](1));
      cplx* data = out.data();
      for (std::size_t p = 0; p < prefix; ++p) {
        cplx* lo = data + (2 * p) * choices;
        cplx* hi = lo + choices;
        for (std::size_t c = 0; c < choices; ++c) {
          const cplx x0 = lo[c], x1 = hi[c];
          lo[c] = a00 * x0 + a01 * x1;
          hi[c] = a10 * x0 + a11 * x1;
        }
      }
    } else {
      if (flip) throw std::invalid_argument("Z mask on a non-qubit party");
      scratch.assign(prefix * 2 * choices, 0.0);
      for (std::size_t p = 0; p < prefix; ++p) {
        for (std::size_t b = 0; b < d; ++b) {
          const cplx c0 = std::conj(u0[static_cast<std::size_t>(k)](static_cast<Eigen::Index>(b)));
          const cplx c1 = std::conj(u1[static_cast<std::size_t>(k)](static_cast<Eigen::Index>(b)));
          const cplx* src = out.data() + (p * d + b) * choices;
          cplx* dst0 = scratch.data() + (2 * p) * choices;
          cplx* dst1 = dst0 + choices;
          for (std::size_t c = 0; c < choices; ++c) {
            dst0[c] += c0 * src[c];
            dst1[c] += c1 * src[c];
          }
        }
      }
      out.swap(scratch);
    }
    choices *= 2;
  }
}

}  // namespace detail

/// Product-vector reduction of the criteria, reusing one pass over the state
/// for every bipartition and every weight vector.
class TauEvaluator {
 public:
  explicit TauEvaluator(const DensityOperator& rho) : TauEvaluator(mixture_view(rho)) {}

  explicit TauEvaluator(MixtureView view) : view_(std::move(view)) {
    n_ = view_.n_parties();
    if (n_ < 2 || n_ > 20) throw std::invalid_argument("TauEvaluator: party count out of range");
    by_size_.resize(static_cast<std::size_t>(n_ / 2 + 1));
    for (int i = 1; i <= n_ / 2; ++i) {
      for (const auto& bp : enumerate_bipartitions(n_, i)) by_size_[static_cast<std::size_t>(i)].push_back(bp.mask());
    }
  }

  int n_parties() const { return n_; }
  const MixtureView& view() const { return view_; }

  ProbeMoments moments(const Probe& probe) const {
    if (probe.phi1.dims() != view_.dims || probe.phi2.dims() != view_.dims) {
      throw std::invalid_argument("TauEvaluator: probe dimension mismatch");
    }
    const std::size_t subsets = std::size_t{1} << n_;
    const PartyMask full = full_mask(n_);
    ProbeMoments m;
    m.n = n_;
    m.diag.assign(subsets, view_.identity_weight);
    if (view_.identity_weight != 0.0) {
      cplx ip = 1.0;
      for (int k = 0; k < n_; ++k) ip *= probe.phi1.factor(k).dot(probe.phi2.factor(k));
      m.off += view_.identity_weight * ip;
    }
    std::vector<cplx> table, scratch;
    for (const auto& c : view_.components) {
      detail::subset_overlaps(c.state->amplitudes(), view_.dims, probe.phi1.factors(), probe.phi2.factors(), c.z_mask,
                              table, scratch);
      m.off += c.weight * table[0] * std::conj(table[full]);
      for (std::size_t s = 0; s < subsets; ++s) m.diag[s] += c.weight * std::norm(table[s]);
    }
    return m;
  }

  double contribution(const ProbeMoments& m, PartyMask s) const {
    const PartyMask full = full_mask(n_);
    return std::sqrt(detail::clipped_diagonal(m.diag[s]) * detail::clipped_diagonal(m.diag[full & ~s]));
  }

  double tau(const ProbeMoments& m, const WeightVector& w) const {
    double value = std::abs(m.off);
    for (int i = 1; i <= n_ / 2; ++i) {
      const double a = w(i);
      if (a <= 0.0) continue;
      double sum = 0.0;
      for (PartyMask s : by_size_[static_cast<std::size_t>(i)]) sum += contribution(m, s);
      value -= a * sum;
    }
    return value;
  }

  double value(const Probe& probe, const WeightVector& w) const { return tau(moments(probe), w); }

  /// Same as value(probe_from_angles(x, n), w) for qubit parties, without
  /// building the probe.
  double value_from_angles(std::span<const double> x, const WeightVector& w) const {
    const std::size_t n = static_cast<std::size_t>(n_);
    if (x.size() != 4 * n) throw std::invalid_argument("value_from_angles: need 4n angles");
    if (!std::all_of(view_.dims.begin(), view_.dims.end(), [](int d) { return d == 2; })) {
      throw unsupported_error("value_from_angles: qubit parties required");
    }
    thread_local std::vector<cplx> rows, table;
    thread_local std::vector<double> diag;
    rows.resize(8 * n);
    cplx ip = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t a = 2 * k, b = 2 * n + 2 * k;
      const cplx p0 = std::cos(x[a] / 2), p1 = std::polar(std::sin(x[a] / 2), x[a + 1]);
      const cplx q0 = std::cos(x[b] / 2), q1 = std::polar(std::sin(x[b] / 2), x[b + 1]);
      rows[8 * k + 0] = std::conj(p0);
      rows[8 * k + 1] = std::conj(p1);
      rows[8 * k + 2] = std::conj(q0);
      rows[8 * k + 3] = std::conj(q1);
      rows[8 * k + 4] = rows[8 * k + 0];
      rows[8 * k + 5] = -rows[8 * k + 1];
      rows[8 * k + 6] = rows[8 * k + 2];
      rows[8 * k + 7] = -rows[8 * k + 3];
      ip *= std::conj(p0) * q0 + std::conj(p1) * q1;
    }
    const std::size_t subsets = std::size_t{1} << n;
    const PartyMask full = full_mask(n_);
    diag.assign(subsets, view_.identity_weight);
    cplx off = view_.identity_weight * ip;
    for (const auto& c : view_.components) {
      const CVector& amps = c.state->amplitudes();
      table.assign(amps.data(), amps.data() + amps.size());
      std::size_t choices = 1, prefix = subsets;
      for (std::size_t kk = n; kk-- > 0;) {
        prefix /= 2;
        const cplx* r = rows.data() + 8 * kk + ((c.z_mask & party_bit(n_, static_cast<int>(kk))) ? 4 : 0);
        cplx* data = table.data();
        for (std::size_t p = 0; p < prefix; ++p) {
          cplx* lo = data + (2 * p) * choices;
          cplx* hi = lo + choices;
          for (std::size_t q = 0; q < choices; ++q) {
            const cplx x0 = lo[q], x1 = hi[q];
            lo[q] = r[0] * x0 + r[1] * x1;
            hi[q] = r[2] * x0 + r[3] * x1;
          }
        }
        choices *= 2;
      }
      off += c.weight * table[0] * std::conj(table[full]);
      for (std::size_t sidx = 0; sidx < subsets; ++sidx) diag[sidx] += c.weight * std::norm(table[sidx]);
    }
    double value = std::abs(off);
    for (int i = 1; i <= n_ / 2; ++i) {
      const double a = w(i);
      if (a <= 0.0) continue;
      double sum = 0.0;
      for (PartyMask sm : by_size_[static_cast<std::size_t>(i)]) {
        sum += std::sqrt(detail::clipped_diagonal(diag[sm]) * detail::clipped_diagonal(diag[full & ~sm]));
      }
      value -= a * sum;
    }
    return value;
  }

  TauResult evaluate(const Probe& probe, const WeightVector& w) const {
    w.validate();
    if (w.n != n_) throw std::invalid_argument("TauEvaluator: weights do not match the party count");
    const auto m = moments(probe);
    TauResult r;
    r.weights = w;
    r.probe = probe;
    r.f_value = std::abs(m.off);
    double penalty = 0.0;
    for (int i = 1; i <= n_ / 2; ++i) {
      const double a = w(i);
      if (a <= 0.0) continue;
      for (PartyMask s : by_size_[static_cast<std::size_t>(i)]) {
        const double c = contribution(m, s);
        r.contributions.emplace_back(Bipartition(n_, s), c);
        penalty += a * c;
      }
    }
    r.value = r.f_value - penalty;
    return r;
  }

 private:
  MixtureView view_;
  int n_ = 0;
  std::vector<std::vector<PartyMask>> by_size_;
};

namespace detail {

/// Local vector on party k left after contracting every other party of amps
/// with the conjugated factors.
inline CVector contract_except(const CVector& amps, const Dims& dims, const std::vector<CVector>& factors, int k) {
  const int n = static_cast<int>(dims.size());
  CVector before = CVector::Ones(1), after = CVector::Ones(1);
  auto kron_conj = [](const CVector& acc, const CVector& f) {
    CVector out(acc.size() * f.size());
    for (Eigen::Index i = 0; i < acc.size(); ++i) out.segment(i * f.size(), f.size()) = acc(i) * f.conjugate();
    return out;
  };
  for (int j = 0; j < k; ++j) before = kron_conj(before, factors[static_cast<std::size_t>(j)]);
  for (int j = k + 1; j < n; ++j) after = kron_conj(after, factors[static_cast<std::size_t>(j)]);
  const auto dk = static_cast<Eigen::Index>(dims[static_cast<std::size_t>(k)]);
  CVector out = CVector::Zero(dk);
  for (Eigen::Index a = 0; a < before.size(); ++a) {
    for (Eigen::Index b = 0; b < dk; ++b) {
      const Eigen::Index base = (a * dk + b) * after.size();
      out(b) += before(a) * (after.transpose() * amps.segment(base, after.size()))(0);
    }
  }
  return out;
}

}  // namespace detail

/// Alternating per-party maximization of |<phi1|rho|phi2>|. Each step replaces
/// one party's pair of factors by the top singular vectors of the induced
/// local form, so f never decreases across sweeps.
inline Probe seed_probe(const MixtureView& view, double tol = 1e-10, int max_sweeps = 200) {
  const int n = view.n_parties();
  const Dims& dims = view.dims;
  std::vector<CVector> a, b;
  const EnsembleMember* lead = nullptr;
  for (const auto& c : view.components) {
    if (!lead || c.weight > lead->weight) lead = &c;
  }
  for (int k = 0; k < n; ++k) {
    CVector v = CVector::Zero(dims[static_cast<std::size_t>(k)]);
    if (lead) {
      const PureState s = PureState::normalized(dims, lead->amplitudes());
      if (n == 1) {
        v = s.amplitudes();
      } else {
        const auto red = reduced_density(s, party_bit(n, k)).matrix();
        Eigen::SelfAdjointEigenSolver<CMatrix> es(red);
        v = es.eigenvectors().col(es.eigenvalues().size() - 1);
      }
    } else {
      v(0) = 1.0;
    }
    a.push_back(v.normalized());
    b.push_back(v.normalized());
  }
  std::vector<CVector> comp_amps;
  for (const auto& c : view.components) comp_amps.push_back(c.amplitudes());
  double prev = -1.0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double f = 0.0;
    for (int k = 0; k < n; ++k) {
      const auto dk = static_cast<Eigen::Index>(dims[static_cast<std::size_t>(k)]);
      CMatrix m = CMatrix::Zero(dk, dk);
      for (std::size_t c = 0; c < comp_amps.size(); ++c) {
        const CVector alpha = detail::contract_except(comp_amps[c], dims, a, k);
        const CVector beta = detail::contract_except(comp_amps[c], dims, b, k);
        m.noalias() += view.components[c].weight * alpha * beta.adjoint();
      }
      if (view.identity_weight != 0.0) {
        cplx ip = 1.0;
        for (int j = 0; j < n; ++j) {
          if (j != k) ip *= a[static_cast<std::size_t>(j)].dot(b[static_cast<std::size_t>(j)]);
        }
        m += view.identity_weight * ip * CMatrix::Identity(dk, dk);
      }
      Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      a[static_cast<std::size_t>(k)] = svd.matrixU().col(0);
      b[static_cast<std::size_t>(k)] = svd.matrixV().col(0);
      f = svd.singularValues()(0);
    }
    if (std::abs(f - prev) <= tol) break;
    prev = f;
  }
  return Probe{ProductVector::normalized(a), ProductVector::normalized(b)};
}

inline Probe seed_probe(const DensityOperator& rho) { return seed_probe(mixture_view(rho)); }

struct OptimizerConfig {
  int restarts = 32;
  std::size_t max_evals = 5000;
  double tol = 1e-8;
  std::uint64_t seed = 0x6b70617274ULL;
  /// Extra start, tried first (warm start from a neighbouring problem).
  std::optional<Probe> warm_start;
  bool use_seed_probe = true;
  /// Stop all restarts once a value above this is found.
  double stop_above = std::numeric_limits<double>::infinity();
};

/// Random point on the Bloch sphere for every factor.
template <class Rng>
std::vector<double> random_probe_angles(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(4 * n));
  for (std::size_t i = 0; i < x.size(); i += 2) {
    x[i] = std::acos(1.0 - 2.0 * u(rng));
    x[i + 1] = 2.0 * std::numbers::pi * u(rng);
  }
  return x;
}

/// Multi-start simplex maximization of tau over qubit probes.
inline TauResult tau_optimized(const TauEvaluator& ev, const WeightVector& weights, const OptimizerConfig& cfg = {}) {
  const int n = ev.n_parties();
  weights.validate();
  if (weights.n != n) throw std::invalid_argument("tau_optimized: weights do not match the party count");
  for (int d : ev.view().dims) {
    if (d != 2) throw std::invalid_argument("tau_optimized: qubit parties only");
  }
  SimplexOptions opt;
  opt.max_evals = cfg.max_evals;
  opt.xtol = cfg.tol;
  opt.stop_below = -cfg.stop_above;
  auto objective = [&](const std::vector<double>& x) { return -ev.value_from_angles(x, weights); };

  std::vector<std::vector<double>> starts;
  if (cfg.warm_start) starts.push_back(probe_angles(*cfg.warm_start));
  if (cfg.use_seed_probe) starts.push_back(probe_angles(seed_probe(ev.view())));

  std::vector<double> best_x;
  double best = std::numeric_limits<double>::infinity();
  std::size_t evals = 0;
  const int total = std::max(cfg.restarts, static_cast<int>(starts.size()));
  for (int r = 0; r < total; ++r) {
    std::vector<double> x0;
    if (static_cast<std::size_t>(r) < starts.size()) {
      x0 = starts[static_cast<std::size_t>(r)];
    } else {
      std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                        static_cast<std::uint32_t>(r)};
      std::mt19937_64 rng(seq);
      x0 = random_probe_angles(n, rng);
    }
    const auto res = nelder_mead(objective, x0, opt);
    evals += res.evals;
    if (res.value < best) {
      best = res.value;
      best_x = res.x;
    }
    if (-best > cfg.stop_above) break;
  }
  TauResult out = ev.evaluate(probe_from_angles(best_x, n), weights);
  out.angles = best_x;
  out.evaluations = evals;
  return out;
}

inline TauResult tau_optimized(const DensityOperator& rho, const WeightVector& weights, const OptimizerConfig& cfg = {}) {
  check_weights_for(rho, weights);
  return tau_optimized(TauEvaluator(rho), weights, cfg);
}

/// Unitary on the doubled space (copy 1 parties, then copy 2 parties) that
/// exchanges the two copies' factors on the parties in mask.
inline Operator permutation_matrix(PartyMask mask, const Dims& dims) {
  const int n = static_cast<int>(dims.size());
  if (n > 4) throw unsupported_error("permutation_matrix: n > 4");
  const std::size_t d = total_dim(dims);
  Dims doubled = dims;
  doubled.insert(doubled.end(), dims.begin(), dims.end());
  CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(d * d));
  // index = x * d + y; digits of x and y follow the per-party encoding.
  auto encode = [&](const std::vector<int>& digits) {
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k) idx = idx * static_cast<std::size_t>(dims[static_cast<std::size_t>(k)]) + static_cast<std::size_t>(digits[static_cast<std::size_t>(k)]);
    return idx;
  };
  for (std::size_t x = 0; x < d; ++x) {
    for (std::size_t y = 0; y < d; ++y) {
      auto dx = basis_digits(x, dims), dy = basis_digits(y, dims);
      for (int k = 0; k < n; ++k) {
        if (mask & party_bit(n, k)) std::swap(dx[static_cast<std::size_t>(k)], dy[static_cast<std::size_t>(k)]);
      }
      p(static_cast<Eigen::Index>(encode(dx) * d + encode(dy)), static_cast<Eigen::Index>(x * d + y)) = 1.0;
    }
  }
  return Operator(std::move(doubled), std::move(p), true);
}

inline Operator global_permutation_matrix(const Dims& dims) {
  return permutation_matrix(full_mask(static_cast<int>(dims.size())), dims);
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

/// Literal doubled-space construction: builds rho (x) rho and the permutation
/// matrices and evaluates sqrt(<Phi|Pi rho(x)rho|Phi>) and
/// sqrt(<Phi|Pi_S rho(x)rho Pi_S^dagger|Phi>) directly.
inline double tau_bruteforce(const DensityOperator& rho, const WeightVector& weights, const Probe& probe) {
  const int n = rho.n_parties();
  if (n > 4) throw unsupported_error("tau_bruteforce: n > 4");
  check_weights_for(rho, weights);
  const CMatrix r = rho.to_dense();
  const CMatrix rr = kron(r, r);
  CVector phi = kron(probe.phi1.expand(), probe.phi2.expand());
  auto root = [](cplx v) {
    if (v.real() < -1e-12) throw positivity_error("tau_bruteforce: negative doubled-space form");
    return std::sqrt(std::max(v.real(), 0.0));
  };
  const CMatrix pg = global_permutation_matrix(rho.dims()).matrix();
  double value = root(phi.dot(pg * (rr * phi)));
  for (int i = 1; i <= n / 2; ++i) {
    const double a = weights(i);
    if (a <= 0.0) continue;
    for (const auto& bp : enumerate_bipartitions(n, i)) {
      const CMatrix ps = permutation_matrix(bp.mask(), rho.dims()).matrix();
      const CVector moved = ps.adjoint() * phi;
      value -= a * root(phi.dot(ps * (rr * moved)));
    }
  }
  return value;
}

struct WeightCase {
  std::vector<int> block_sizes;
  double value = 0.0;
};

struct WeightReport {
  double max_violation = -std::numeric_limits<double>::infinity();
  std::vector<WeightCase> cases;
};

/// Maximizes tau over random states with every block of at most k-1 parties,
/// cycling through all block-size compositions. A sound weight vector keeps
/// max_violation <= 0 up to rounding.
template <class Rng>
WeightReport validate_weights(const WeightVector& weights, int samples, Rng& rng, OptimizerConfig cfg = {}) {
  weights.validate();
  const auto shapes = integer_partitions(weights.n, weights.k - 1);
  WeightReport rep;
  for (int s = 0; s < samples; ++s) {
    const auto& sizes = shapes[static_cast<std::size_t>(s) % shapes.size()];
    const PureState psi = random_block_state(sizes, rng);
    cfg.seed = rng();
    const auto res = tau_optimized(TauEvaluator(DensityOperator::from_pure(psi)), weights, cfg);
    rep.cases.push_back(WeightCase{sizes, res.value});
    rep.max_violation = std::max(rep.max_violation, res.value);
  }
  return rep;
}

}  // namespace kpart
