#include <doctest.h>

#include <numbers>

#include "pushasep/bethe.hpp"

using namespace pushasep;

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

TEST_CASE("critical radius") {
  CHECK(critical_radius(RingParams{4, 2, 0.5}) == doctest::Approx(0.5));
  CHECK(critical_radius(RingParams{6, 2, 0.5}) == doctest::Approx(std::pow(1.0 / 3, 1.0 / 3) * std::pow(2.0 / 3, 2.0 / 3)));
}

TEST_CASE("roots of q_z and their classification") {
  const RingParams P{6, 2, 0.7};
  const double r0 = critical_radius(P);
  for (double frac : {0.2, 0.6, 0.95}) {
    const cplx z = std::polar(frac * r0, 0.37);
    const auto set = q_roots(z, P);
    REQUIRE(set.roots.size() == 6);
    for (const auto& w : set.roots) CHECK(std::abs(q_poly(w, P) - ipow(z, 6)) < 1e-12);
    REQUIRE(set.classified);
    CHECK(set.q1.size() == 2);
    CHECK(set.q0.size() == 4);
    for (int i : set.q1) CHECK(set.roots[i].real() > 1.0 - P.rho());
    for (int i : set.q0) CHECK(set.roots[i].real() < 1.0 - P.rho());
    REQUIRE(set.cycles.size() == 2);
    for (const auto& c : set.cycles) CHECK(c.size() == 3);
  }
}

TEST_CASE("q polynomial derivative and lambda q'") {
  const RingParams P{7, 3, 0.4};
  const cplx w(1.3, 0.2);
  const double h = 1e-6;
  const cplx fd = (q_poly(w + h, P) - q_poly(w - h, P)) / (2 * h);
  CHECK(std::abs(fd - q_poly_derivative(w, P)) < 1e-7);
  for (const auto& lam : q_polynomial_roots(cplx(0.01, 0.003), P))
    CHECK(std::abs(lam * q_poly_derivative(lam, P) / q_poly(lam, P) - lambda_qprime(lam, P)) < 1e-9);
}

TEST_CASE("Bethe functions") {
  const CVector lam{cplx(1.2, 0.3), cplx(-0.4, 0.9), cplx(0.7, -1.1)};
  const std::vector<int> y{0, 2, 3}, x{1, 2, 5};
  CHECK(std::abs(amplitude_sum(lam, y, x) - bethe_h(lam, y) * bethe_u(lam, x)) < 1e-12);
  const cplx zeta = std::polar(0.9, 0.4);
  CVector ws;
  for (const auto& l : lam) ws.push_back(l / zeta);
  CHECK(std::abs(bethe_function(ws, x, zeta) - std::pow(zeta, 8) * bethe_u(lam, x)) < 1e-12);
  const RingParams P{6, 3, 0.7};
  CHECK(std::abs(energy(ws, zeta, P) - energy_lambda(lam, P)) < 1e-13);
}

TEST_CASE("subset and arrangement enumeration") {
  int subsets = 0, arrangements = 0;
  for_each_subset(6, 3, [&](const std::vector<int>&) { ++subsets; });
  for_each_arrangement(5, 3, [&](const std::vector<int>&) { ++arrangements; });
  CHECK(subsets == 20);
  CHECK(arrangements == 60);
}

TEST_CASE("Fuss-Catalan numbers") {
  CHECK(fuss_catalan(Rational(2), Rational(1), 5) == Rational(42));
  CHECK(fuss_catalan(Rational(3), Rational(1), 4) == Rational(55));
  CHECK(fuss_catalan(Rational(2), Rational(1), 0) == Rational(1));
  CHECK(fuss_catalan(2.0, 1.0, 6) == doctest::Approx(132.0));

  SUBCASE("convolution") {
    const Rational p(3);
    for (int m = 0; m <= 8; ++m) {
      Rational acc(0);
      for (int k = 0; k <= m; ++k) acc += fuss_catalan(p, Rational(1), k) * fuss_catalan(p, Rational(2), m - k);
      CHECK(acc == fuss_catalan(p, Rational(3), m));
    }
  }

  SUBCASE("cube of the Catalan series") {
    std::vector<Rational> b(7);
    for (int m = 0; m < 7; ++m) b[m] = fuss_catalan(Rational(2), Rational(1), m);
    for (int m = 0; m < 7; ++m) {
      Rational acc(0);
      for (int i = 0; i <= m; ++i)
        for (int j = 0; i + j <= m; ++j) acc += b[i] * b[j] * b[m - i - j];
      CHECK(acc == fuss_catalan(Rational(2), Rational(3), m));
    }
  }

  SUBCASE("logarithm of the Catalan series") {
    std::vector<Rational> b(4), c(4);
    for (int m = 0; m < 4; ++m) b[m] = fuss_catalan(Rational(2), Rational(1), m);
    for (int m = 1; m < 4; ++m) {
      Rational acc = b[m] * m;
      for (int k = 1; k < m; ++k) acc -= c[k] * k * b[m - k];
      c[m] = acc / m;
    }
    CHECK(c[1] == Rational(1));
    CHECK(c[2] == Rational(3, 2));
    CHECK(c[3] == Rational(10, 3));
  }
}

TEST_CASE("series for the attached Q1 roots") {
  const RingParams P{6, 2, 0.7};
  const cplx z = std::polar(0.1, 0.3);
  const auto set = q_roots(z, P);
  for (int k = 0; k < P.N; ++k) {
    const cplx eta = std::polar(1.0, 2 * pi * k / P.N);
    const cplx s = phi_expansion(z, eta, 8, P);
    double best = 1e300;
    for (int i : set.q1) best = std::min(best, std::abs(1.0 - 1.0 / set.roots[i] - s));
    CHECK(best < 1e-10);
  }
}

TEST_CASE("Psi") {
  const RingParams P{6, 2, 0.7};
  const cplx z = std::polar(0.15, 0.3);
  CHECK(std::abs(psi_product(z, P) - std::exp(log_psi(z, P))) < 1e-13);
  const cplx small = std::polar(0.05, 0.2);
  const cplx lead = log_psi(small, P) / ipow(small, 6);
  CHECK(std::abs(lead - 15.0) < 15.0 * 1e-5);
}

TEST_CASE("limit ratio at small z") {
  for (const auto& P : {RingParams{4, 2, 0.7}, RingParams{6, 3, 1.0}, RingParams{6, 2, 0.5}}) {
    const double target = 1.0 / (P.N * static_cast<double>(binomial(P.L, P.N)));
    CHECK(std::abs(limit_ratio(cplx(1e-3, 0.0), P) - target) < 1e-6);
  }
  for (const auto& P : {RingParams{4, 2, 0.7}, RingParams{6, 3, 1.0}}) {
    const double target = 1.0 / (P.N * static_cast<double>(binomial(P.L, P.N)));
    const double ratio = std::abs(limit_ratio(cplx(1e-2, 0.0), P) - target) /
                         std::abs(limit_ratio(cplx(5e-3, 0.0), P) - target);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("roots at very small s") {
  const RingParams P{7, 3, 0.5};
  for (double mag : {1e-30, 1e-12, 1e-4, 0.01}) {
    const cplx s = std::polar(mag, 2.0);
    const auto r = q_polynomial_roots(s, P);
    REQUIRE(r.size() == 7);
    // Residual at most a few ulps of w propagated through q'.
    for (const auto& w : r)
      CHECK(std::abs(q_poly(w, P) - s) < 1e-12 * mag + 8e-16 * std::abs(w * q_poly_derivative(w, P)));
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = i + 1; j < r.size(); ++j) CHECK(std::abs(r[i] - r[j]) > 0.0);
  }
}
