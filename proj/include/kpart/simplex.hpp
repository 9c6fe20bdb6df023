#pragma once

// Derivative-free local minimization (Nelder-Mead with dimension-adaptive
// coefficients) and a seeded multi-start driver.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace kpart {

struct SimplexOptions {
  std::size_t max_evals = 5000;
  /// Converged when every vertex lies within xtol of the best one (max-norm)
  /// and the value spread is below ftol * (|f_best| + ftol).
  double xtol = 1e-8;
  double ftol = 1e-12;
  double initial_step = 0.5;
  /// Rebuild the simplex around the best point after convergence, up to this
  /// many times, while evaluations remain and the restart improved the value.
  int rebuilds = 2;
  /// Stop as soon as a value <= stop_below is seen.
  double stop_below = -std::numeric_limits<double>::infinity();
};

struct SimplexResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  std::size_t evals = 0;
  bool converged = false;
};

namespace detail {

inline SimplexResult nelder_mead_once(const std::function<double(const std::vector<double>&)>& f,
                                      const std::vector<double>& x0, double step, std::size_t budget,
                                      const SimplexOptions& opt) {
  const std::size_t dim = x0.size();
  const double nd = static_cast<double>(std::max<std::size_t>(dim, 2));
  const double alpha = 1.0, beta = 1.0 + 2.0 / nd, gam = 0.75 - 1.0 / (2.0 * nd), delta = 1.0 - 1.0 / nd;

  SimplexResult res;
  std::vector<std::vector<double>> pts(dim + 1, x0);
  std::vector<double> vals(dim + 1);
  auto eval = [&](const std::vector<double>& x) {
    ++res.evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  vals[0] = eval(x0);
  for (std::size_t i = 0; i < dim; ++i) {
    pts[i + 1][i] += step;
    vals[i + 1] = eval(pts[i + 1]);
  }
  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), xr(dim), xe(dim), xc(dim);

  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[dim - (dim > 0 ? 1 : 0)];
    if (vals[best] <= opt.stop_below) break;

    double spread = 0.0;
    for (std::size_t i = 0; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) spread = std::max(spread, std::abs(pts[i][j] - pts[best][j]));
    }
    const double fspread = vals[worst] - vals[best];
    if (spread <= opt.xtol && fspread <= opt.ftol * (std::abs(vals[best]) + opt.ftol)) {
      res.converged = true;
      break;
    }
    if (spread <= opt.xtol * 1e-3) {
      res.converged = true;
      break;
    }
    if (res.evals >= budget) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[i][j] / static_cast<double>(dim);
    }
    for (std::size_t j = 0; j < dim; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - pts[worst][j]);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      for (std::size_t j = 0; j < dim; ++j) xe[j] = centroid[j] + beta * (xr[j] - centroid[j]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    for (std::size_t j = 0; j < dim; ++j) {
      xc[j] = outside ? centroid[j] + gam * (xr[j] - centroid[j]) : centroid[j] - gam * (centroid[j] - pts[worst][j]);
    }
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < dim; ++j) pts[i][j] = pts[best][j] + delta * (pts[i][j] - pts[best][j]);
      vals[i] = eval(pts[i]);
    }
  }
  const auto bi = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  res.x = pts[bi];
  res.value = vals[bi];
  return res;
}

}  // namespace detail

/// Minimizes f from x0.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                                 const SimplexOptions& opt = {}) {
  SimplexResult total;
  total.x = x0;
  double step = opt.initial_step;
  for (int round = 0; round <= opt.rebuilds; ++round) {
    if (total.evals >= opt.max_evals) break;
    auto r = detail::nelder_mead_once(f, total.x, step, opt.max_evals - total.evals, opt);
    const bool improved = r.value < total.value - opt.ftol * (std::abs(total.value) + opt.ftol);
    total.evals += r.evals;
    if (r.value < total.value) {
      total.value = r.value;
      total.x = r.x;
    }
    total.converged = r.converged;
    if (total.value <= opt.stop_below || !improved || !r.converged) break;
    step = std::max(opt.xtol * 100, step * 0.2);
  }
  return total;
}

}  // namespace kpart
