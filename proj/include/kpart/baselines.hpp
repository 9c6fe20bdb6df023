#pragma once

// Comparison criteria: the phase-optimized variance test for 4-qubit
// single-excitation states and the collective-spin squeezing bound.

#include "kpart/qstate.hpp"
#include "kpart/simplex.hpp"

#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/tools/minima.hpp>

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>

namespace kpart {

struct PhaseTriple {
  double phi1 = 0.0, phi2 = 0.0, phi3 = 0.0;

  PhaseTriple() = default;
  PhaseTriple(double a, double b, double c) : phi1(wrap(a)), phi2(wrap(b)), phi3(wrap(c)) {}

  static double wrap(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(x, two_pi);
    return r < 0 ? r + two_pi : r;
  }
};

/// The four sign patterns on |1000>, |0100>, |0010>, |0001>.
inline std::vector<PureState> w_basis(const PhaseTriple& p) {
  static constexpr std::array<std::array<int, 4>, 4> signs{{{1, 1, 1, 1}, {1, -1, -1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}}};
  const std::array<cplx, 4> ph{1.0, std::polar(1.0, p.phi1), std::polar(1.0, p.phi2), std::polar(1.0, p.phi3)};
  const std::array<Eigen::Index, 4> idx{8, 4, 2, 1};
  std::vector<PureState> out;
  for (const auto& s : signs) {
    CVector v = CVector::Zero(16);
    for (std::size_t i = 0; i < 4; ++i) v(idx[i]) = 0.5 * static_cast<double>(s[i]) * ph[i];
    out.emplace_back(qubit_dims(4), std::move(v));
  }
  return out;
}

/// 1 - sum_i <W_i|rho|W_i>^2.
inline double delta(const DensityOperator& rho, const PhaseTriple& p) {
  if (rho.n_parties() != 4 || rho.dim() != 16) throw std::invalid_argument("delta: 4-qubit state required");
  double s = 0.0;
  for (const auto& w : w_basis(p)) {
    cplx e;
    if (rho.is_dense()) {
      e = w.amplitudes().dot(rho.matrix() * w.amplitudes());
    } else {
      e = 0.0;
      for (const auto& m : rho.members()) e += m.weight * std::norm(w.amplitudes().dot(m.amplitudes()));
    }
    s += e.real() * e.real();
  }
  return 1.0 - s;
}

inline double delta_threshold(int k) {
  switch (k) {
    case 2: return 3.0 / 4.0;
    case 3: return 1.0 / 2.0;
    case 4: return 5.0 / 12.0;
    default: throw std::invalid_argument("delta_threshold: k must be 2, 3 or 4");
  }
}

struct PhaseSearch {
  double value = 0.0;
  PhaseTriple phases;
};

/// Minimum of delta over the phases: 8^3 grid, then a simplex refinement
/// from the best grid point.
inline PhaseSearch min_delta(const DensityOperator& rho, int grid = 8) {
  const double step = 2.0 * std::numbers::pi / grid;
  PhaseSearch best{std::numeric_limits<double>::infinity(), {}};
  for (int a = 0; a < grid; ++a) {
    for (int b = 0; b < grid; ++b) {
      for (int c = 0; c < grid; ++c) {
        const PhaseTriple p(a * step, b * step, c * step);
        const double v = delta(rho, p);
        if (v < best.value) best = {v, p};
      }
    }
  }
  SimplexOptions opt;
  opt.initial_step = step / 2;
  opt.max_evals = 2000;
  opt.xtol = 1e-9;
  auto f = [&](const std::vector<double>& x) { return delta(rho, PhaseTriple(x[0], x[1], x[2])); };
  const auto r = nelder_mead(f, {best.phases.phi1, best.phases.phi2, best.phases.phi3}, opt);
  if (r.value < best.value) best = {r.value, PhaseTriple(r.x[0], r.x[1], r.x[2])};
  return best;
}

/// min over phases of delta minus the depth-k threshold; negative certifies
/// k-partite entanglement.
inline double d_k(const DensityOperator& rho, int k) { return min_delta(rho).value - delta_threshold(k); }

/// Spin-j operators in the |j, m> basis, m = j, j-1, ..., -j.
struct SpinOperators {
  CMatrix jx, jy, jz;
};

inline SpinOperators spin_operators(double j) {
  const int d = static_cast<int>(std::lround(2 * j)) + 1;
  SpinOperators s{CMatrix::Zero(d, d), CMatrix::Zero(d, d), CMatrix::Zero(d, d)};
  CMatrix jp = CMatrix::Zero(d, d);
  for (int r = 0; r < d; ++r) {
    const double m = j - r;
    s.jz(r, r) = m;
    if (r > 0) jp(r - 1, r) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  s.jx = (jp + jp.adjoint()) / 2.0;
  s.jy = (jp - jp.adjoint()) / cplx(0.0, 2.0);
  return s;
}

/// Sampled lower bound F_j on [0, 1] with cubic Hermite interpolation.
class SpinBoundCurve {
 public:
  SpinBoundCurve(double j, std::vector<double> x, std::vector<double> f, std::vector<double> slope)
      : j_(j), x_(x), f_(f), slope_(slope),
        interp_(std::make_shared<boost::math::interpolators::cubic_hermite<std::vector<double>>>(
            std::move(x), std::move(f), std::move(slope))) {}

  double j() const { return j_; }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& f() const { return f_; }

  double operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("spin_bound: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    return std::max(0.0, (*interp_)(x));
  }

  void write_csv(std::ostream& os) const {
    os.precision(17);
    os << "x,F\n";
    for (std::size_t i = 0; i < x_.size(); ++i) os << x_[i] << ',' << f_[i] << '\n';
  }

 private:
  double j_;
  std::vector<double> x_, f_, slope_;
  std::shared_ptr<const boost::math::interpolators::cubic_hermite<std::vector<double>>> interp_;
};

namespace detail {

struct SpinPoint {
  double x, f, mu;
};

/// Ground state of (J_z - c)^2 - mu J_x minimized over the shift c; returns
/// the point (<J_x>/j, Var(J_z)/j) of the minimizing state.
inline SpinPoint spin_tangent_point(const SpinOperators& s, double j, double mu) {
  const auto d = s.jz.rows();
  auto ground = [&](double c) {
    const CMatrix shifted = s.jz - c * CMatrix::Identity(d, d);
    const CMatrix h = shifted * shifted - mu * s.jx;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    return std::make_pair(es.eigenvalues()(0), CVector(es.eigenvectors().col(0)));
  };
  // E(c) may have several local minima; bracket on a grid first.
  const int grid = 64;
  double best_c = 0.0, best_e = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i) {
    const double c = j * i / grid;
    const double e = ground(c).first;
    if (e < best_e) best_e = e, best_c = c;
  }
  const double lo = std::max(0.0, best_c - j / grid), hi = std::min(j, best_c + j / grid);
  const auto r = boost::math::tools::brent_find_minima([&](double c) { return ground(c).first; }, lo, hi, 52);
  const double c = r.second <= best_e ? r.first : best_c;
  const CVector v = ground(c).second;
  const double ex = v.dot(s.jx * v).real();
  const double ez = v.dot(s.jz * v).real();
  const double ez2 = v.dot(s.jz * s.jz * v).real();
  return {std::clamp(std::abs(ex) / j, 0.0, 1.0), std::max(0.0, (ez2 - ez * ez) / j), mu};
}

}  // namespace detail

/// Tangent construction of F_j: each multiplier mu gives a point of the lower
/// convex envelope of (x, Var/j) with slope mu. The mu grid (400 log points in
/// [1e-4, 1e4]) is refined until neighbouring x samples are within max_gap.
inline SpinBoundCurve build_spin_bound(double j, double max_gap = 1e-3) {
  if (j < 0.5 || std::abs(2 * j - std::round(2 * j)) > 1e-12) throw std::invalid_argument("spin_bound: j must be a positive half-integer");
  const SpinOperators s = spin_operators(j);
  std::vector<detail::SpinPoint> pts;
  const int grid = 400;
  for (int i = 0; i < grid; ++i) {
    const double mu = std::pow(10.0, -4.0 + 8.0 * i / (grid - 1));
    pts.push_back(detail::spin_tangent_point(s, j, mu));
  }
  auto by_mu = [](const detail::SpinPoint& a, const detail::SpinPoint& b) { return a.mu < b.mu; };
  for (int pass = 0; pass < 40; ++pass) {
    std::sort(pts.begin(), pts.end(), by_mu);
    std::vector<detail::SpinPoint> extra;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (std::abs(pts[i + 1].x - pts[i].x) <= max_gap) continue;
      if (pts[i + 1].mu / pts[i].mu < 1.0 + 1e-12) continue;
      extra.push_back(detail::spin_tangent_point(s, j, std::sqrt(pts[i].mu * pts[i + 1].mu)));
    }
    if (extra.empty()) break;
    pts.insert(pts.end(), extra.begin(), extra.end());
  }
  // Pinned endpoints: the J_z eigenstate with <J_x> = 0 and the coherent state.
  pts.push_back({0.0, 0.0, 0.0});
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.x < b.x || (a.x == b.x && a.mu < b.mu); });
  std::vector<detail::SpinPoint> clean;
  for (const auto& p : pts) {
    if (p.x >= 1.0 - 1e-9) continue;
    if (!clean.empty() && p.x - clean.back().x < 1e-9) continue;
    clean.push_back(p);
  }
  clean.push_back({1.0, 0.5, std::numeric_limits<double>::quiet_NaN()});
  // Lower convex hull.
  std::vector<detail::SpinPoint> hull;
  for (const auto& p : clean) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      if ((b.x - a.x) * (p.f - a.f) - (b.f - a.f) * (p.x - a.x) <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  std::vector<double> x, f, m;
  for (const auto& p : hull) {
    x.push_back(p.x);
    f.push_back(p.f);
    m.push_back(p.mu);
  }
  const std::size_t last = x.size() - 1;
  // One-sided three-point slope at x = 1.
  if (last >= 2) {
    const double h1 = x[last] - x[last - 1], h0 = x[last - 1] - x[last - 2];
    const double d1 = (f[last] - f[last - 1]) / h1, d0 = (f[last - 1] - f[last - 2]) / h0;
    m[last] = std::max(d1 + h1 * (d1 - d0) / (h0 + h1), d1);
  } else {
    m[last] = (f[last] - f[0]) / (x[last] - x[0]);
  }
  // Keep every cubic piece monotone.
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double secant = (f[i + 1] - f[i]) / (x[i + 1] - x[i]);
    if (secant <= 0.0) {
      m[i] = m[i + 1] = 0.0;
      continue;
    }
    const double a = m[i] / secant, b = m[i + 1] / secant;
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double t = 3.0 / std::sqrt(r);
      m[i] = t * a * secant;
      m[i + 1] = t * b * secant;
    }
  }
  return SpinBoundCurve(j, std::move(x), std::move(f), std::move(m));
}

/// Cached curve for spin j.
inline const SpinBoundCurve& spin_bound_curve(double j) {
  if (j < 0.5 || std::abs(2 * j - std::round(2 * j)) > 1e-12) throw std::invalid_argument("spin_bound: j must be a positive half-integer");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<SpinBoundCurve>> cache;
  const int key = static_cast<int>(std::lround(2 * j));
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<SpinBoundCurve>(build_spin_bound(key / 2.0));
  return *slot;
}

inline double spin_bound(double j, double x) { return spin_bound_curve(j)(x); }

struct SpinSqueezingResult {
  double jx = 0.0;
  double var_min = 0.0;
  /// Certified depth k+1, or 1 when no bound is violated.
  int depth = 1;
};

/// <J_x> and the minimum of Var(J_z) over rotations about x, i.e. the
/// smallest eigenvalue of the (J_y, J_z) covariance matrix.
inline std::pair<double, double> squeezing_moments(const DensityOperator& rho) {
  const int n = rho.n_parties();
  const CMatrix r = rho.to_dense();
  const CMatrix jx = collective_op(n, Axis::x).matrix();
  const CMatrix jy = collective_op(n, Axis::y).matrix();
  const CMatrix jz = collective_op(n, Axis::z).matrix();
  auto ev = [&](const CMatrix& a) { return (r * a).trace().real(); };
  const double my = ev(jy), mz = ev(jz);
  const double vyy = ev(jy * jy) - my * my;
  const double vzz = ev(jz * jz) - mz * mz;
  const double vyz = 0.5 * ev(jy * jz + jz * jy) - my * mz;
  Eigen::Matrix2d cov;
  cov << vyy, vyz, vyz, vzz;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  return {ev(jx), es.eigenvalues()(0)};
}

inline SpinSqueezingResult certify_spin_squeezing(const DensityOperator& rho, int n) {
  if (rho.n_parties() != n) throw std::invalid_argument("certify_spin_squeezing: party count mismatch");
  const auto [jx, var] = squeezing_moments(rho);
  SpinSqueezingResult r{jx, var, 1};
  const double x = std::clamp(std::abs(jx) / (n / 2.0), 0.0, 1.0);
  for (int k = 1; k < n; ++k) {
    if (n % k != 0) continue;
    if (var < (n / 2.0) * spin_bound(k / 2.0, x) - 1e-12) r.depth = k + 1;
  }
  return r;
}

}  // namespace kpart
