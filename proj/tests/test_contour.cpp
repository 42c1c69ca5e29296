#include <doctest.h>

#include <numbers>

#include "pushasep/contour.hpp"
#include "pushasep/errors.hpp"
#include "pushasep/oracle.hpp"

using namespace pushasep;

TEST_CASE("circle quadrature of monomials") {
  for (int k = -4; k <= 4; ++k) {
    const cplx a = circle_quadrature(0.0, 0.7, 16, [&](cplx z) { return ipow(z, k); });
    CHECK(std::abs(a - (k == 0 ? 1.0 : 0.0)) < 1e-14);
    const cplx b = circle_quadrature(0.0, 1.3, 16, [&](cplx z) { return ipow(z, k); }, Measure::Dz);
    CHECK(std::abs(b - (k == -1 ? 1.0 : 0.0)) < 1e-14);
  }
}

TEST_CASE("contour specification") {
  const RingParams P{5, 2, 0.7};
  const auto s = make_spec(P);
  CHECK(s.variant == ContourVariant::Cond);
  CHECK(s.eps_prime < s.R_prime);
  CHECK(s.eps1 > 0.0);
  CHECK(s.eps2 > 0.0);
  CHECK(make_spec(RingParams{4, 2, 0.5}).variant == ContourVariant::CondPrime);
  CHECK_THROWS_AS((QuadratureBudget{0, 48}.validate()), ConfigError);
}

TEST_CASE("zeta shift") {
  const cplx zeta = std::polar(0.8, 0.3);
  CHECK(std::abs(zeta_shift({0, 1}, {2, 4}, zeta) - std::pow(zeta, 5)) < 1e-14);
}

TEST_CASE("onefold formula against the master equation at generic zeta") {
  const RingParams P{5, 2, 0.7};
  const cplx zeta = std::polar(1.0, 0.45);
  const auto g = gf_onefold_table(zeta, 0.6, make_spec(P), {}, P);
  const auto T = transition_matrix(0.6, zeta, P);
  CHECK((g - T).cwiseAbs().maxCoeff() < 1e-6);
  const auto states = enumerate_states(P);
  CHECK(std::abs(gf_onefold(states[2], states[7], zeta, 0.6, make_spec(P), {}, P) - T(7, 2)) < 1e-6);
}

TEST_CASE("full formula reduces to the identity at t = 0") {
  const RingParams P{5, 2, 0.4};
  const cplx zeta = std::polar(1.0, 0.4);
  const auto g = gf_full_table(zeta, 0.0, make_spec(P), {}, P);
  CHECK((g - GfTable::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("u0") {
  const RingParams P{5, 2, 0.7};
  const Configuration y{0, 2}, x{1, 4};
  SUBCASE("stationary value at roots of unity") {
    const cplx zeta = std::polar(1.0, 2 * std::numbers::pi / 5);
    CHECK(std::abs(u0(y, x, zeta, 0.7, make_spec(P), {}, P) - 0.1) < 1e-15);
    const double r = 0.5 * critical_radius(P);
    CHECK(std::abs(u0_quadrature(y, x, 1.0, 0.7, r, 64, P) - 0.1) < 1e-11);
  }
  SUBCASE("radius independence at generic zeta") {
    const cplx zeta = std::polar(1.0, 0.3);
    const double r0 = critical_radius(P);
    const cplx a = u0_quadrature(y, x, zeta, 0.7, 0.3 * r0, 64, P);
    const cplx b = u0_quadrature(y, x, zeta, 0.7, 0.6 * r0, 96, P);
    CHECK(std::abs(a - b) < 1e-6);
  }
  CHECK_THROWS_AS(u0_quadrature(y, x, 1.0, 0.7, 2.0, 64, P), ConfigError);
}

TEST_CASE("r coefficient") {
  const RingParams P{4, 2, 0.5};
  const CVector lam{cplx(2.0), cplx(1.0, 1.0)};
  const cplx expect = 4.0 - 1.0 / (lam[0] - 0.5) - 1.0 / (lam[1] - 0.5);
  CHECK(std::abs(r_coefficient(lam, P) - expect) < 1e-15);
}
