#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace kpart;
using namespace kpart::testing;
using Catch::Approx;

namespace {

CMatrix pauli_string(int n, const std::vector<std::pair<int, Axis>>& ops) {
  CMatrix m = CMatrix::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    Eigen::Matrix2cd local = Eigen::Matrix2cd::Identity();
    for (const auto& [site, a] : ops) {
      if (site == k) local = pauli(a);
    }
    m = kron(m, CMatrix(local));
  }
  return m;
}

}  // namespace

TEST_CASE("dephasing damps coherences by exp(-gt) per differing qubit") {
  Rng rng(51);
  const auto psi = random_pure(qubit_dims(4), rng);
  const double gt = 0.37;
  const CMatrix out = dephase(psi, gt).to_dense();
  const CMatrix in = psi.amplitudes() * psi.amplitudes().adjoint();
  for (Eigen::Index x = 0; x < 16; ++x) {
    for (Eigen::Index y = 0; y < 16; ++y) {
      const double f = std::exp(-gt * std::popcount(static_cast<unsigned>(x ^ y)));
      CHECK(std::abs(out(x, y) - in(x, y) * f) < 1e-14);
    }
  }
  CHECK((dephase(psi, 0.0).to_dense() - in).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE_THROWS(dephase(psi, -1.0));
}

TEST_CASE("analytic probe is locally optimal along the trajectory") {
  const auto g = make_graph_state(complete_graph(4), 4);
  OptimizerConfig cfg;
  cfg.restarts = 4;
  cfg.warm_start = analytic_probe(4);
  for (double gt : {0.0, 0.1, 0.4}) {
    const TauEvaluator ev(dephase(g, gt));
    const auto w = builtin_weights(4, 4);
    const double base = ev.value(analytic_probe(4), w);
    CHECK(tau_optimized(ev, w, cfg).value <= std::max(base, 0.0) + 1e-6);
  }
}

TEST_CASE("lifetimes bracket the sign change") {
  const auto g = make_graph_state(complete_graph(6), 6);
  const auto t = lifetimes(g, {2, 4, 6});
  REQUIRE(t.size() == 3);
  for (const auto& [k, ts] : t) {
    const auto before = dephased_tau(g, ts - 2e-3, {k}, analytic_probe(6));
    const auto after = dephased_tau(g, ts + 2e-3, {k}, analytic_probe(6));
    CHECK(before[0] > 0.0);
    CHECK(after[0] <= 0.0);
  }
  CHECK(t.at(2) > t.at(4));
  CHECK(t.at(4) > t.at(6));
  LifetimeOptions short_run;
  short_run.max_gamma_t = 0.01;
  REQUIRE_THROWS_AS(lifetime(2, 6, complete_graph(6), short_run), not_found_error);
}

TEST_CASE("random Hamiltonians") {
  SECTION("reproducible and in range") {
    const auto a = HamiltonianSpec::random(5, 3, Boundary::periodic, 7);
    const auto b = HamiltonianSpec::random(5, 3, Boundary::periodic, 7);
    CHECK(a.axes == b.axes);
    CHECK(a.couplings == b.couplings);
    CHECK(a.bond_count() == 5);
    CHECK(HamiltonianSpec::random(5, 2, Boundary::open, 7).bond_count() == 4);
    CHECK(HamiltonianSpec::random(5, 3, Boundary::open, 7).bond_count() == 3);
    for (double l : a.couplings) CHECK((l >= 0.5 && l <= 1.5));
  }
  SECTION("matches an explicit Kronecker construction") {
    for (auto bc : {Boundary::open, Boundary::periodic}) {
      for (int body : {2, 3}) {
        const auto spec = HamiltonianSpec::random(4, body, bc, 11);
        CMatrix expected = CMatrix::Zero(16, 16);
        for (std::size_t b = 0; b < spec.bond_count(); ++b) {
          std::vector<std::pair<int, Axis>> ops;
          const auto sites = spec.bond_sites(b);
          for (std::size_t f = 0; f < sites.size(); ++f) ops.push_back({sites[f], spec.axes[b][f]});
          expected += spec.couplings[b] * pauli_string(4, ops);
        }
        CHECK((random_hamiltonian(spec).matrix() - expected).cwiseAbs().maxCoeff() < 1e-14);
      }
    }
  }
  SECTION("spec validation") {
    auto spec = HamiltonianSpec::random(5, 2, Boundary::open, 1);
    spec.couplings.pop_back();
    REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);
    REQUIRE_THROWS(HamiltonianSpec::random(5, 4, Boundary::open, 1));
  }
}

TEST_CASE("propagation") {
  Rng rng(52);
  const auto h = random_hamiltonian(HamiltonianSpec::random(4, 2, Boundary::open, 3));
  const auto psi = random_pure(qubit_dims(4), rng);
  const Propagator prop(h);
  const double t = 1e-4;
  const CVector first_order = psi.amplitudes() - cplx(0.0, t) * (h.matrix() * psi.amplitudes());
  CHECK((prop.evolve(psi, t).amplitudes() - first_order).norm() < 1e-7);
  const auto back = prop.evolve(prop.evolve(psi, 0.8), -0.8);
  CHECK((back.amplitudes() - psi.amplitudes()).norm() < 1e-12);
}

TEST_CASE("growth exponent of a monomial") {
  const auto t = log_grid(-4, -2, 0.5);
  REQUIRE(t.size() == 5);
  CHECK(t.front() == Approx(1e-4));
  CHECK(t.back() == Approx(1e-2));
  std::vector<double> v;
  for (double x : t) v.push_back(3.0 * x * x);
  for (const auto& p : growth_exponent(v, t)) CHECK(p.alpha == Approx(2.0));
  REQUIRE_THROWS_AS(growth_exponent({1e-13, 1e-13, 1.0}, {1.0, 2.0, 3.0}), insufficient_data_error);
}

TEST_CASE("short-time growth under a generic two-body chain") {
  // x-y bonds on every neighbour pair; the leading order is t^2.
  HamiltonianSpec spec{5, 2, Boundary::open, {}, {}, 0};
  for (std::size_t b = 0; b < spec.bond_count(); ++b) {
    spec.axes.push_back({Axis::x, Axis::y});
    spec.couplings.push_back(1.0);
  }
  OptimizerConfig cfg;
  cfg.restarts = 4;
  const auto times = log_grid(-3.2, -2.8, 0.1);
  const auto tr = growth_run(spec, PureState::basis(qubit_dims(5), 31), times, builtin_weights(3, 5), cfg);
  const auto a = growth_exponent(tr.tau, tr.times);
  CHECK(a[a.size() / 2].alpha == Approx(2.0).margin(0.05));
}
