#pragma once

// Dephasing of graph states and closed evolution under random nearest-neighbour
// Pauli Hamiltonians.

#include "kpart/hierarchy.hpp"

#include <map>

namespace kpart {

/// Kraus mixture sum_s prod_k p_{s_k} Z_s|psi><psi|Z_s with
/// p_1 = (1 + e^{-gt})/2 and p_2 = (1 - e^{-gt})/2.
inline DensityOperator dephase(const PureState& initial, double gamma_t) {
  if (!(gamma_t >= 0.0)) throw std::invalid_argument("dephase: negative gamma_t");
  const int n = initial.n_parties();
  detail::require_qubits_for_mask(initial.dims(), full_mask(n));
  auto shared = std::make_shared<const PureState>(initial);
  if (gamma_t == 0.0) return DensityOperator::from_ensemble(initial.dims(), {EnsembleMember{1.0, shared, 0}});
  const double e = std::exp(-gamma_t);
  const double p1 = (1.0 + e) / 2, p2 = (1.0 - e) / 2;
  std::vector<EnsembleMember> members;
  members.reserve(std::size_t{1} << n);
  for (PartyMask s = 0; s <= full_mask(n); ++s) {
    const int flips = std::popcount(s);
    members.push_back({std::pow(p1, n - flips) * std::pow(p2, flips), shared, s});
  }
  return DensityOperator::from_ensemble(initial.dims(), std::move(members));
}

/// phi1 = ((|0> + i|1>)/sqrt2)^n, phi2 = ((|0> - i|1>)/sqrt2)^n.
inline Probe analytic_probe(int n) {
  CVector a(2), b(2);
  a << 1.0 / std::sqrt(2.0), cplx(0.0, 1.0 / std::sqrt(2.0));
  b << 1.0 / std::sqrt(2.0), cplx(0.0, -1.0 / std::sqrt(2.0));
  return Probe{ProductVector::uniform(n, a), ProductVector::uniform(n, b)};
}

/// tau_{k,n} at one noise level for every requested k, sharing the probe moments.
inline std::vector<double> dephased_tau(const PureState& initial, double gamma_t, const std::vector<int>& ks,
                                        const Probe& probe) {
  const TauEvaluator ev(dephase(initial, gamma_t));
  const auto m = ev.moments(probe);
  std::vector<double> out;
  for (int k : ks) out.push_back(ev.tau(m, builtin_weights(k, initial.n_parties())));
  return out;
}

struct DephasingTrajectory {
  std::vector<double> gamma_t;
  std::vector<int> ks;
  /// tau[i][t] for ks[i] at gamma_t[t].
  std::vector<std::vector<double>> tau;
  Probe probe;
};

inline DephasingTrajectory dephasing_trajectory(const PureState& initial, const std::vector<int>& ks,
                                                const std::vector<double>& grid) {
  const int n = initial.n_parties();
  DephasingTrajectory tr{grid, ks, std::vector<std::vector<double>>(ks.size()), analytic_probe(n)};
  for (double g : grid) {
    const auto v = dephased_tau(initial, g, ks, tr.probe);
    for (std::size_t i = 0; i < ks.size(); ++i) tr.tau[i].push_back(v[i]);
  }
  return tr;
}

struct LifetimeOptions {
  double step = 0.02;
  double tol = 1e-4;
  double max_gamma_t = 5.0;
};

/// First zero crossing of tau_k(gamma_t) for each k: coarse bracketing shared
/// across k, then bisection per k. Missing entries had no sign change.
inline std::map<int, double> lifetimes(const PureState& initial, const std::vector<int>& ks, const LifetimeOptions& opt = {}) {
  const Probe probe = analytic_probe(initial.n_parties());
  std::map<int, double> out;
  std::vector<double> lo(ks.size(), 0.0), hi(ks.size(), -1.0);
  const auto v0 = dephased_tau(initial, 0.0, ks, probe);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(v0[i] > 0.0)) throw std::invalid_argument("lifetimes: tau at gamma_t = 0 is not positive for k = " + std::to_string(ks[i]));
  }
  std::size_t open = ks.size();
  for (int s = 1; open > 0; ++s) {
    const double g = s * opt.step;
    if (g > opt.max_gamma_t + 1e-12) break;
    const auto v = dephased_tau(initial, g, ks, probe);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (hi[i] >= 0.0) continue;
      if (v[i] <= 0.0) {
        hi[i] = g;
        --open;
      } else {
        lo[i] = g;
      }
    }
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (hi[i] < 0.0) continue;
    double a = lo[i], b = hi[i];
    while (b - a > opt.tol) {
      const double mid = 0.5 * (a + b);
      if (dephased_tau(initial, mid, {ks[i]}, probe)[0] > 0.0) a = mid;
      else b = mid;
    }
    out[ks[i]] = 0.5 * (a + b);
  }
  return out;
}

inline double lifetime(int k, int n, const std::vector<std::vector<int>>& adjacency, const LifetimeOptions& opt = {}) {
  const auto r = lifetimes(make_graph_state(adjacency, n), {k}, opt);
  const auto it = r.find(k);
  if (it == r.end()) throw not_found_error("lifetime: no sign change up to gamma_t = " + std::to_string(opt.max_gamma_t));
  return it->second;
}

enum class Boundary { open, periodic };

struct HamiltonianSpec {
  int n = 5;
  int body = 2;
  Boundary boundary = Boundary::open;
  /// axes[b][f]: Pauli axis of factor f on bond b.
  std::vector<std::vector<Axis>> axes;
  std::vector<double> couplings;
  std::uint64_t seed = 0;

  std::size_t bond_count() const {
    return boundary == Boundary::open ? static_cast<std::size_t>(n - body + 1) : static_cast<std::size_t>(n);
  }

  /// Parties of bond b: b, b+1, ..., b+body-1 (mod n).
  std::vector<int> bond_sites(std::size_t b) const {
    std::vector<int> s;
    for (int f = 0; f < body; ++f) s.push_back((static_cast<int>(b) + f) % n);
    return s;
  }

  void validate() const {
    if (body != 2 && body != 3) throw std::invalid_argument("HamiltonianSpec: body must be 2 or 3");
    if (n < body) throw std::invalid_argument("HamiltonianSpec: n < body");
    if (axes.size() != bond_count() || couplings.size() != bond_count()) {
      throw std::invalid_argument("HamiltonianSpec: bond count mismatch");
    }
    for (const auto& a : axes) {
      if (a.size() != static_cast<std::size_t>(body)) throw std::invalid_argument("HamiltonianSpec: axes per bond != body");
    }
  }

  /// Axes uniform over {x, y, z} per factor and bond, couplings Uniform(0.5, 1.5).
  static HamiltonianSpec random(int n, int body, Boundary boundary, std::uint64_t seed) {
    HamiltonianSpec h{n, body, boundary, {}, {}, seed};
    if (body != 2 && body != 3) throw std::invalid_argument("HamiltonianSpec: body must be 2 or 3");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> axis(0, 2);
    std::uniform_real_distribution<double> lambda(0.5, 1.5);
    for (std::size_t b = 0; b < h.bond_count(); ++b) {
      std::vector<Axis> a;
      for (int f = 0; f < body; ++f) a.push_back(static_cast<Axis>(axis(rng)));
      h.axes.push_back(std::move(a));
      h.couplings.push_back(lambda(rng));
    }
    return h;
  }
};

inline Operator random_hamiltonian(const HamiltonianSpec& spec) {
  spec.validate();
  if (spec.n > 10) throw unsupported_error("random_hamiltonian: n > 10");
  const int n = spec.n;
  const auto d = Eigen::Index{1} << n;
  CMatrix h = CMatrix::Zero(d, d);
  for (std::size_t b = 0; b < spec.bond_count(); ++b) {
    const auto sites = spec.bond_sites(b);
    // Pauli strings map each basis state to one basis state with a phase.
    for (Eigen::Index x = 0; x < d; ++x) {
      Eigen::Index y = x;
      cplx amp = spec.couplings[b];
      for (std::size_t f = 0; f < sites.size(); ++f) {
        const auto bit = static_cast<Eigen::Index>(party_bit(n, sites[f]));
        const bool one = (x & bit) != 0;
        switch (spec.axes[b][f]) {
          case Axis::x: y ^= bit; break;
          case Axis::y: y ^= bit; amp *= one ? cplx(0.0, -1.0) : cplx(0.0, 1.0); break;
          case Axis::z: if (one) amp = -amp; break;
        }
      }
      h(y, x) += amp;
    }
  }
  return Operator(qubit_dims(n), std::move(h), true);
}

/// exp(-iHt) through one eigendecomposition of H.
class Propagator {
 public:
  explicit Propagator(const Operator& h) : dims_(h.dims()) {
    if (!h.hermitian()) throw std::invalid_argument("Propagator: Hamiltonian must be Hermitian");
    if (h.matrix().rows() > 1024) throw unsupported_error("Propagator: dimension > 1024");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
  }

  PureState evolve(const PureState& psi, double t) const {
    CVector c = vectors_.adjoint() * psi.amplitudes();
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -energies_(i) * t);
    return PureState::normalized(dims_, vectors_ * c);
  }

 private:
  Dims dims_;
  Eigen::VectorXd energies_;
  CMatrix vectors_;
};

inline PureState evolve(const PureState& psi, const Operator& h, double t) { return Propagator(h).evolve(psi, t); }

struct GrowthPoint {
  double t = 0.0;
  double alpha = 0.0;
};

/// Centered differences of log10(tau) against log10(t); points with
/// tau <= 1e-12 are dropped first.
inline std::vector<GrowthPoint> growth_exponent(const std::vector<double>& tau_values, const std::vector<double>& times) {
  if (tau_values.size() != times.size()) throw std::invalid_argument("growth_exponent: size mismatch");
  std::vector<double> lt, lv;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (tau_values[i] > 1e-12 && times[i] > 0.0) {
      lt.push_back(std::log10(times[i]));
      lv.push_back(std::log10(tau_values[i]));
    }
  }
  if (lt.size() < 3) throw insufficient_data_error("growth_exponent: fewer than 3 usable points");
  std::vector<GrowthPoint> out;
  for (std::size_t i = 1; i + 1 < lt.size(); ++i) {
    out.push_back({std::pow(10.0, lt[i]), (lv[i + 1] - lv[i - 1]) / (lt[i + 1] - lt[i - 1])});
  }
  return out;
}

/// t = 10^(lo + step i) for i = 0..count-1.
inline std::vector<double> log_grid(double lo_exp, double hi_exp, double step) {
  std::vector<double> t;
  const int count = static_cast<int>(std::lround((hi_exp - lo_exp) / step)) + 1;
  for (int i = 0; i < count; ++i) t.push_back(std::pow(10.0, lo_exp + step * i));
  return t;
}

struct GrowthTrajectory {
  std::vector<double> times;
  std::vector<double> tau;
  std::vector<Probe> probes;
};

/// tau_{k,n}(psi(t)) along the evolution, swept from the largest time down so
/// that the small-t points start from a probe found where the signal is large.
/// With optimize set, every point is maximized with a warm start from the
/// previously visited point's probe, then refined by alternating ascending and
/// descending passes that restart each point from its neighbour's probe.
/// Without optimize the first probe found is reused.
inline GrowthTrajectory growth_run(const HamiltonianSpec& spec, const PureState& initial, const std::vector<double>& times,
                                   const WeightVector& weights, OptimizerConfig cfg, bool optimize = true,
                                   int refine_passes = 3) {
  const Propagator prop(random_hamiltonian(spec));
  GrowthTrajectory out;
  out.times = times;
  out.tau.assign(times.size(), 0.0);
  out.probes.assign(times.size(), analytic_probe(initial.n_parties()));
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] > times[b]; });
  std::optional<Probe> prev;
  for (std::size_t idx : order) {
    const TauEvaluator ev(DensityOperator::from_pure(prop.evolve(initial, times[idx])));
    if (!optimize && prev) {
      out.tau[idx] = ev.value(*prev, weights);
      out.probes[idx] = *prev;
      continue;
    }
    cfg.warm_start = prev;
    const auto r = tau_optimized(ev, weights, cfg);
    out.tau[idx] = r.value;
    out.probes[idx] = r.probe;
    prev = r.probe;
  }
  if (!optimize) return out;
  OptimizerConfig local = cfg;
  local.restarts = 1;
  local.use_seed_probe = false;
  auto refine = [&](std::size_t from, std::size_t to) {
    const TauEvaluator ev(DensityOperator::from_pure(prop.evolve(initial, times[to])));
    local.warm_start = out.probes[from];
    const auto r = tau_optimized(ev, weights, local);
    if (r.value > out.tau[to]) {
      out.tau[to] = r.value;
      out.probes[to] = r.probe;
    }
  };
  for (int pass = 0; pass < refine_passes; ++pass) {
    if (pass % 2 == 0) {
      for (std::size_t i = order.size() - 1; i > 0; --i) refine(order[i], order[i - 1]);
    } else {
      for (std::size_t i = 0; i + 1 < order.size(); ++i) refine(order[i], order[i + 1]);
    }
  }
  return out;
}

}  // namespace kpart
