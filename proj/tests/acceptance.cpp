// Acceptance runner: `acceptance <id>` checks one criterion and prints a
// PASS/FAIL line for it; `acceptance all` runs every criterion.

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <string>

using namespace kpart;
using namespace kpart::testing;

namespace {

constexpr double margin = 1e-9;

class Clock {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

void info(const std::string& s) { std::cout << "  info: " << s << '\n' << std::flush; }

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

bool near(double v, double target, double tol) { return std::abs(v - target) <= tol; }

/// Smallest q in [lo, hi] where pred turns true, assuming it stays true above.
double threshold(double lo, double hi, const std::function<bool(double)>& pred, double tol = 1e-3) {
  if (!pred(hi)) return std::numeric_limits<double>::quiet_NaN();
  if (pred(lo)) return lo;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

bool criterion1() {
  Clock clock;
  Rng rng(101);
  double worst_ref = 0.0, worst_fast = 0.0, worst_angles = 0.0;
  for (int n = 2; n <= 4; ++n) {
    for (int s = 0; s < 100; ++s) {
      const DensityOperator rho = ginibre_density(qubit_dims(n), rng, 1 + s % (1 << n));
      const WeightVector w = builtin_weights(2 + s % (n - 1), n);
      const auto x = random_probe_angles(n, rng);
      const Probe p = probe_from_angles(x, n);
      const double oracle = tau_bruteforce(rho, w, p);
      const TauEvaluator ev(rho);
      worst_ref = std::max(worst_ref, std::abs(tau(rho, w, p).value - oracle));
      worst_fast = std::max(worst_fast, std::abs(ev.value(p, w) - oracle));
      worst_angles = std::max(worst_angles, std::abs(ev.value_from_angles(x, w) - oracle));
    }
  }
  const double worst = std::max({worst_ref, worst_fast, worst_angles});
  info("max |tau - oracle|: reference " + fmt(worst_ref) + ", evaluator " + fmt(worst_fast) + ", angle path " +
       fmt(worst_angles));
  info("runtime " + fmt(clock.seconds(), 3) + " s");
  return worst <= 1e-10 && clock.seconds() < 300;
}

bool criterion2() {
  Clock clock;
  Rng rng(202);
  OptimizerConfig cfg;
  cfg.restarts = 4;
  cfg.stop_above = margin;
  double worst = -1.0;
  bool ok = true;
  for (int n = 2; n <= 8; ++n) {
    for (int k = 2; k <= n; ++k) {
      const auto rep = validate_weights(builtin_weights(k, n), 500, rng, cfg);
      int bad = 0;
      for (const auto& c : rep.cases) bad += c.value > margin;
      info("k=" + std::to_string(k) + " n=" + std::to_string(n) + " max violation " + fmt(rep.max_violation) +
           " violating samples " + std::to_string(bad) + "/500");
      worst = std::max(worst, rep.max_violation);
      ok = ok && rep.max_violation <= margin;
    }
  }
  // Closed form for GHZ products with the |0..0>,|1..1> probe: f = prod 2^-1 and
  // f_ij = f for every bipartition that is a union of blocks, else 0.
  for (const auto& [k, n, sizes] : std::vector<std::tuple<int, int, std::vector<int>>>{{4, 7, {3, 2, 2}}}) {
    const auto psi = ghz_blocks(sizes);
    const double v = TauEvaluator(DensityOperator::from_pure(psi)).value(all_zero_one_probe(n), builtin_weights(k, n));
    info("GHZ blocks 3+2+2 under the k=4 n=7 row: tau = " + fmt(v) + " (expected 1/16)");
  }
  info("runtime " + fmt(clock.seconds(), 4) + " s");
  std::cout << "  worst violation " << fmt(worst) << '\n';
  return ok && clock.seconds() < 1800;
}

bool criterion3() {
  Clock clock;
  Rng rng(303);
  std::uniform_int_distribution<int> pick_n(2, 6);
  double worst_iii = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const int n = pick_n(rng);
    const auto bps = all_bipartitions(n);
    const Bipartition& bp = bps[std::uniform_int_distribution<std::size_t>(0, bps.size() - 1)(rng)];
    const auto members = bp.members();
    std::vector<int> rest;
    for (int p = 0; p < n; ++p) {
      if (std::find(members.begin(), members.end(), p) == members.end()) rest.push_back(p);
    }
    const PureState psi = assemble_blocks(n, {members, rest},
                                          {random_pure(qubit_dims(static_cast<int>(members.size())), rng),
                                           random_pure(qubit_dims(static_cast<int>(rest.size())), rng)});
    const DensityOperator rho = DensityOperator::from_pure(psi);
    const Probe p = random_probe(n, rng);
    worst_iii = std::max(worst_iii, std::abs(f_global(rho, p) - f_bipartition(rho, p, bp)));
  }
  double worst_convex = -1.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 1000; ++s) {
    const int n = 2 + s % 4;
    const auto r1 = ginibre_density(qubit_dims(n), rng, 1 + s % 3);
    const auto r2 = ginibre_density(qubit_dims(n), rng, 1 + (s / 3) % 3);
    const double lam = u(rng);
    const DensityOperator mix = DensityOperator::from_dense(qubit_dims(n), lam * r1.matrix() + (1 - lam) * r2.matrix());
    const WeightVector w = builtin_weights(2 + s % (n - 1), n);
    const Probe p = random_probe(n, rng);
    const double lhs = tau(mix, w, p).value;
    const double rhs = lam * tau(r1, w, p).value + (1 - lam) * tau(r2, w, p).value;
    worst_convex = std::max(worst_convex, lhs - rhs);
  }
  info("condition III max |f - f_ij| " + fmt(worst_iii));
  info("convexity max excess " + fmt(worst_convex));
  info("runtime " + fmt(clock.seconds(), 3) + " s");
  return worst_iii <= 1e-8 && worst_convex <= 1e-10;
}

bool criterion4() {
  Rng rng(404);
  double worst = 0.0;
  for (int n = 2; n <= 8; ++n) {
    for (int s = 0; s < 200; ++s) {
      const DensityOperator rho = DensityOperator::from_pure(product_state(random_factors(n, rng)));
      const double v = TauEvaluator(rho).value(random_probe(n, rng), builtin_weights(2, n));
      worst = std::max(worst, std::abs(v));
    }
    info("n=" + std::to_string(n) + " running max |tau_2| " + fmt(worst));
  }
  return worst <= 1e-12;
}

bool criterion5() {
  Clock clock;
  const PureState w = make_w_state(4);
  const auto basis = single_excitation_basis(4);
  OptimizerConfig cfg;
  cfg.restarts = 24;
  cfg.stop_above = margin;
  auto detects = [&](int k, bool subspace) {
    return [&, k, subspace](double q) {
      const DensityOperator rho = subspace ? werner_mix_subspace(w, q, std::span<const PureState>(basis)) : werner_mix(w, q);
      return tau_optimized(rho, w_state_weights(k, 4), cfg).value > margin;
    };
  };
  auto d_detects = [&](int k, bool subspace) {
    return [&, k, subspace](double q) {
      const DensityOperator rho = subspace ? werner_mix_subspace(w, q, std::span<const PureState>(basis)) : werner_mix(w, q);
      return d_k(rho, k) < 0.0;
    };
  };
  const double t4 = threshold(0.0, 1.0, detects(4, true));
  const double t3 = threshold(0.0, 1.0, detects(3, true));
  const double d3 = threshold(0.0, 1.0, d_detects(3, true));
  const double d4 = threshold(0.0, 1.0, d_detects(4, true));
  bool t2_all = true;
  double t2_min = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 50; ++i) {
    const double q = 0.02 * i;
    const double v = tau_optimized(werner_mix_subspace(w, q, std::span<const PureState>(basis)), w_state_weights(2, 4), cfg).value;
    t2_min = std::min(t2_min, v);
    t2_all = t2_all && v > margin;
  }
  info("noise on the single-excitation span: tau4 " + fmt(t4, 4) + ", tau3 " + fmt(t3, 4) + ", d3 " + fmt(d3, 4) + ", d4 " +
       fmt(d4, 4) + ", min tau2 on q>=0.02 " + fmt(t2_min));
  info("white noise on all 16 levels: tau4 " + fmt(threshold(0.0, 1.0, detects(4, false)), 4) + ", tau3 " +
       fmt(threshold(0.0, 1.0, detects(3, false)), 4) + ", d3 " + fmt(threshold(0.0, 1.0, d_detects(3, false)), 4));
  info("runtime " + fmt(clock.seconds(), 3) + " s");
  return near(t4, 2.0 / 3.0, 0.02) && near(t3, 0.30, 0.02) && near(d3, 0.58, 0.02) && t2_all && clock.seconds() < 600;
}

bool criterion6() {
  Clock clock;
  const auto basis = single_excitation_basis(4);
  OptimizerConfig cfg;
  cfg.restarts = 32;
  cfg.stop_above = margin;
  Rng rng(606);
  const int count = 2000;
  int t3 = 0, d3 = 0, t2 = 0, d2 = 0, exceptions = 0;
  for (int s = 0; s < count; ++s) {
    const auto rho = random_density(std::span<const PureState>(basis), 0.0, 1.0, 1.0, rng);
    const TauEvaluator ev(rho);
    cfg.seed = rng();
    const double dmin = min_delta(rho).value;
    const bool a3 = tau_optimized(ev, w_state_weights(3, 4), cfg).value > margin;
    const bool b3 = dmin - delta_threshold(3) < 0.0;
    t3 += a3;
    d3 += b3;
    exceptions += b3 && !a3;
    t2 += tau_optimized(ev, w_state_weights(2, 4), cfg).value > margin;
    d2 += dmin - delta_threshold(2) < 0.0;
  }
  const double f3 = double(t3) / count, g3 = double(d3) / count;
  info("tau3 detects " + fmt(100 * f3, 4) + "%, d3 " + fmt(100 * g3, 4) + "%, tau2 " + fmt(100.0 * t2 / count, 4) +
       "%, d2 " + fmt(100.0 * d2 / count, 4) + "%, d3-only states " + std::to_string(exceptions));
  info("runtime " + fmt(clock.seconds(), 3) + " s");
  return near(f3, 0.65, 0.05) && near(g3, 0.05, 0.03) && t2 == count && d2 == count && exceptions == 0;
}

int hierarchy_depth(const DensityOperator& rho, OptimizerConfig cfg) {
  const int n = rho.n_parties();
  const TauEvaluator ev(rho);
  cfg.stop_above = margin;
  for (int k = n; k >= 2; --k) {
    if (tau_optimized(ev, builtin_weights(k, n), cfg).value > margin) return k;
  }
  return 1;
}

std::map<std::pair<int, int>, int> spin_table(int n, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> uc(0.0, 0.5), ue(0.8, 1.0);
  OptimizerConfig cfg;
  cfg.restarts = 8;
  std::map<std::pair<int, int>, int> table;
  for (int s = 0; s < count; ++s) {
    const double chi = uc(rng), eta = ue(rng);
    const DensityOperator rho = werner_mix(make_spin_squeezed(n, chi), eta);
    cfg.seed = rng();
    ++table[{certify_spin_squeezing(rho, n).depth, hierarchy_depth(rho, cfg)}];
  }
  for (const auto& [key, num] : table) {
    info("squeezing depth " + std::to_string(key.first) + ", hierarchy depth " + std::to_string(key.second) + ": " +
         std::to_string(num));
  }
  return table;
}

double fraction(const std::map<std::pair<int, int>, int>& t, const std::function<bool(int, int)>& among,
                const std::function<bool(int, int)>& hit) {
  int total = 0, count = 0;
  for (const auto& [key, num] : t) {
    if (!among(key.first, key.second)) continue;
    total += num;
    if (hit(key.first, key.second)) count += num;
  }
  return total ? double(count) / total : std::numeric_limits<double>::quiet_NaN();
}

bool criterion7() {
  Clock clock;
  const auto t = spin_table(4, 4000, 707);
  const double f2 = fraction(t, [](int s, int) { return s == 2; }, [](int, int h) { return h > 2; });
  const double f3 = fraction(t, [](int s, int) { return s == 3; }, [](int, int h) { return h > 3; });
  const double deeper = fraction(t, [](int, int) { return true; }, [](int s, int h) { return s > h; });
  info("squeezing bipartite -> hierarchy deeper: " + fmt(100 * f2, 4) + "%; tripartite -> deeper: " + fmt(100 * f3, 4) +
       "%; squeezing deeper than hierarchy: " + fmt(100 * deeper, 4) + "%");
  info("runtime " + fmt(clock.seconds(), 3) + " s");
  return near(f2, 0.60, 0.10) && near(f3, 0.52, 0.10) && deeper == 0.0;
}

bool criterion7_n6() {
  Clock clock;
  const auto t = spin_table(6, 2500, 7076);
  auto among_h = [](int h0) { return [h0](int, int h) { return h == h0; }; };
  const double a = fraction(t, among_h(2), [](int s, int) { return s == 1; });
  const double b = fraction(t, among_h(2), [](int s, int) { return s == 2; });
  const double c = fraction(t, among_h(2), [](int s, int) { return s > 2; });
  const double d = fraction(t, among_h(3), [](int s, int) { return s == 2; });
  const double e = fraction(t, among_h(3), [](int s, int) { return s == 4; });
  info("hierarchy depth 2: unsqueezed " + fmt(100 * a, 3) + "%, squeezing depth 2 " + fmt(100 * b, 3) +
       "%, squeezing deeper " + fmt(100 * c, 3) + "%");
  info("hierarchy depth 3: squeezing depth 2 " + fmt(100 * d, 3) + "%, squeezing depth 4 " + fmt(100 * e, 3) + "%");
  info("runtime " + fmt(clock.seconds(), 4) + " s");
  return near(a, 0.40, 0.10) && near(b, 0.53, 0.10) && near(c, 0.07, 0.10) && near(d, 0.66, 0.10) &&
         near(e, 0.18, 0.10) && clock.seconds() < 7200;
}

bool criterion8() {
  Clock clock;
  std::vector<int> ks;
  for (int k = 2; k <= 12; ++k) ks.push_back(k);
  const auto t = lifetimes(make_graph_state(complete_graph(12), 12), ks);
  std::string line = "t_s:";
  for (const auto& [k, v] : t) line += " k" + std::to_string(k) + "=" + fmt(v, 5);
  info(line);
  auto get = [&](int k) { return t.count(k) ? t.at(k) : std::numeric_limits<double>::quiet_NaN(); };
  const double t2 = get(2), t10 = get(10), t12 = get(12);
  info("t2/t12 " + fmt(t2 / t12, 4) + ", t10/t12 " + fmt(t10 / t12, 4));
  double gain = 0.0;
  OptimizerConfig cfg;
  cfg.restarts = 8;
  for (int n : {4, 6}) {
    const PureState g = make_graph_state(complete_graph(n), n);
    cfg.warm_start = analytic_probe(n);
    for (double gt : {0.05, 0.2, 0.5, 1.0}) {
      const TauEvaluator ev(dephase(g, gt));
      for (int k = 2; k <= n; ++k) {
        const WeightVector w = builtin_weights(k, n);
        const double base = std::max(0.0, ev.value(analytic_probe(n), w));
        gain = std::max(gain, tau_optimized(ev, w, cfg).value - base);
      }
    }
  }
  info("max optimizer gain over the analytic probe (n = 4, 6) " + fmt(gain));
  info("runtime " + fmt(clock.seconds(), 4) + " s");
  return near(t12, 0.12, 0.01) && near(t2, 2.61, 0.05) && near(t2 / t12, 22.0, 2.0) && t10 >= 2.5 * t12 &&
         gain < 1e-6 && clock.seconds() < 3600;
}

bool criterion9() {
  Clock clock;
  const auto times = log_grid(-4.0, -2.0, 0.1);
  const PureState initial = PureState::basis(qubit_dims(5), 31);
  const WeightVector w = builtin_weights(3, 5);
  OptimizerConfig cfg;
  cfg.restarts = 8;
  bool ok = true;
  for (int body : {2, 3}) {
    for (Boundary bc : {Boundary::open, Boundary::periodic}) {
      const double target = body == 2 ? 2.0 : 1.0;
      int good = 0, flat = 0;
      std::string alphas;
      for (int rep = 0; rep < 20; ++rep) {
        const auto spec = HamiltonianSpec::random(5, body, bc, 1000 + static_cast<std::uint64_t>(rep));
        cfg.seed = spec.seed;
        const auto tr = growth_run(spec, initial, times, w, cfg);
        double alpha = std::numeric_limits<double>::quiet_NaN();
        try {
          for (const auto& p : growth_exponent(tr.tau, tr.times)) {
            if (std::abs(std::log10(p.t) + 3.0) < 1e-6) alpha = p.alpha;
          }
        } catch (const insufficient_data_error&) {
          ++flat;
        }
        good += near(alpha, target, 0.05);
        alphas += " " + fmt(alpha, 3);
      }
      const std::string name = std::string(body == 2 ? "two-body " : "three-body ") + (bc == Boundary::open ? "open" : "periodic");
      info(name + ": " + std::to_string(good) + "/20 within tolerance, " + std::to_string(flat) + " with tau = 0 throughout;" + alphas);
      ok = ok && good == 20;
    }
  }
  info("runtime " + fmt(clock.seconds(), 4) + " s");
  return ok && clock.seconds() < 1200;
}

bool criterion10() {
  double worst = 0.0;
  const auto& c = spin_bound_curve(0.5);
  for (int i = 0; i < 100; ++i) {
    const double x = i / 99.0;
    worst = std::max(worst, std::abs(c(x) - x * x / 2));
  }
  bool zero = true;
  for (double j : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) zero = zero && spin_bound(j, 0.0) == 0.0;
  info("max |F_1/2 - x^2/2| " + fmt(worst) + ", F_j(0) == 0 for j <= 3: " + (zero ? "yes" : "no"));
  return worst <= 1e-6 && zero;
}

const std::vector<std::tuple<std::string, std::string, std::function<bool()>>>& criteria() {
  static const std::vector<std::tuple<std::string, std::string, std::function<bool()>>> list{
      {"1", "oracle equivalence", criterion1},
      {"2", "soundness of the weight tables", criterion2},
      {"3", "condition III identity and convexity", criterion3},
      {"4", "product states give zero", criterion4},
      {"5", "Werner W-state thresholds", criterion5},
      {"6", "single-excitation ensemble fractions", criterion6},
      {"7", "spin-squeezing comparison n=4", criterion7},
      {"7-n6", "spin-squeezing cross-tabulation n=6", criterion7_n6},
      {"8", "dephasing lifetimes", criterion8},
      {"9", "growth exponents", criterion9},
      {"10", "spin bound oracle", criterion10},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <id|all>\n";
    return 2;
  }
  const std::string want = argv[1];
  bool all_ok = true, found = false;
  for (const auto& [id, name, run] : criteria()) {
    if (want != "all" && want != id) continue;
    found = true;
    std::cout << "criterion " << id << ": " << name << '\n' << std::flush;
    bool ok = false;
    try {
      ok = run();
    } catch (const std::exception& e) {
      info(std::string("exception: ") + e.what());
    }
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << name << '\n' << std::flush;
    all_ok = all_ok && ok;
  }
  if (!found) {
    std::cerr << "unknown criterion " << want << '\n';
    return 2;
  }
  return all_ok ? 0 : 1;
}
