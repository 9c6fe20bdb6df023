#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace kpart;
using namespace kpart::testing;
using Catch::Approx;

TEST_CASE("W_i basis is orthonormal for any phases") {
  Rng rng(41);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int s = 0; s < 10; ++s) {
    const auto b = w_basis(PhaseTriple(u(rng), u(rng), u(rng)));
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(std::abs(b[i].amplitudes().dot(b[j].amplitudes()) - (i == j ? 1.0 : 0.0)) < 1e-14);
      }
    }
  }
  CHECK(PhaseTriple(7.0, -1.0, 0.0).phi1 == Approx(7.0 - 2 * std::numbers::pi));
}

TEST_CASE("variance criterion") {
  CHECK(delta_threshold(2) == 0.75);
  CHECK(delta_threshold(3) == 0.5);
  CHECK(delta_threshold(4) == Approx(5.0 / 12));
  REQUIRE_THROWS(delta_threshold(5));
  const auto w = w_basis(PhaseTriple());
  SECTION("pure W state is detected at every depth") {
    const auto rho = DensityOperator::from_pure(w[0]);
    for (int k = 2; k <= 4; ++k) CHECK(d_k(rho, k) < 0.0);
  }
  SECTION("the phase search never does worse than a fixed phase") {
    Rng rng(42);
    const auto basis = single_excitation_basis(4);
    for (int s = 0; s < 10; ++s) {
      const auto rho = random_density(std::span<const PureState>(basis), 0.0, 1.0, 1.0, rng);
      CHECK(min_delta(rho).value <= delta(rho, PhaseTriple(0.3, 1.1, -2.0)) + 1e-12);
    }
  }
  SECTION("maximally mixed single-excitation state sits on the biseparable boundary") {
    const auto basis = single_excitation_basis(4);
    const auto rho = werner_mix_subspace(w[0], 0.0, std::span<const PureState>(basis));
    CHECK(d_k(rho, 2) >= -1e-12);
    CHECK(d_k(rho, 3) > 0.0);
  }
  REQUIRE_THROWS_AS(delta(maximally_mixed(qubit_dims(3)), PhaseTriple()), std::invalid_argument);
}

TEST_CASE("spin operators") {
  for (double j : {0.5, 1.0, 1.5, 3.0}) {
    const auto s = spin_operators(j);
    const CMatrix comm = s.jx * s.jy - s.jy * s.jx;
    CHECK((comm - cplx(0.0, 1.0) * s.jz).cwiseAbs().maxCoeff() < 1e-12);
    const CMatrix casimir = s.jx * s.jx + s.jy * s.jy + s.jz * s.jz;
    CHECK((casimir - j * (j + 1) * CMatrix::Identity(casimir.rows(), casimir.cols())).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("spin bound curves") {
  SECTION("spin 1/2 is x^2/2") {
    for (int i = 0; i <= 50; ++i) CHECK(spin_bound(0.5, i / 50.0) == Approx(0.5 * (i / 50.0) * (i / 50.0)).margin(1e-9));
  }
  SECTION("endpoints") {
    for (double j : {1.0, 1.5, 2.0}) {
      CHECK(spin_bound(j, 0.0) == 0.0);
      CHECK(spin_bound(j, 1.0) == Approx(0.5).margin(1e-9));
    }
  }
  SECTION("larger spins allow more squeezing") {
    for (int i = 1; i < 20; ++i) {
      const double x = i / 20.0;
      CHECK(spin_bound(1.0, x) <= spin_bound(0.5, x) + 1e-9);
      CHECK(spin_bound(2.0, x) <= spin_bound(1.0, x) + 1e-9);
    }
  }
  SECTION("no spin-j state lies below its curve") {
    Rng rng(43);
    for (double j : {1.0, 1.5, 2.0}) {
      const auto s = spin_operators(j);
      const auto d = s.jz.rows();
      for (int t = 0; t < 200; ++t) {
        CVector v = normal_vector(d, rng).normalized();
        const double x = std::abs(v.dot(s.jx * v).real()) / j;
        const double mz = v.dot(s.jz * v).real();
        const double var = v.dot(s.jz * s.jz * v).real() - mz * mz;
        CHECK(spin_bound(j, x) <= var / j + 1e-7);
      }
    }
  }
  REQUIRE_THROWS(spin_bound(0.7, 0.5));
  REQUIRE_THROWS(spin_bound(1.0, 1.2));
}

TEST_CASE("squeezing certification") {
  SECTION("coherent state is not certified") {
    CHECK(certify_spin_squeezing(DensityOperator::from_pure(coherent_x_state(4)), 4).depth == 1);
  }
  SECTION("product mixtures are never certified") {
    Rng rng(44);
    for (int s = 0; s < 200; ++s) {
      const int n = s % 2 ? 4 : 6;
      const auto a = std::make_shared<const PureState>(product_state(random_factors(n, rng)));
      const auto b = std::make_shared<const PureState>(product_state(random_factors(n, rng)));
      const double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const auto rho = DensityOperator::from_ensemble(qubit_dims(n), {{p, a, 0}, {1 - p, b, 0}});
      CHECK(certify_spin_squeezing(rho, n).depth == 1);
    }
  }
  SECTION("a squeezed state is certified") {
    const auto r = certify_spin_squeezing(DensityOperator::from_pure(make_spin_squeezed(4, 0.1)), 4);
    CHECK(r.depth >= 2);
    CHECK(r.var_min < 1.0);
  }
}
