#include <doctest.h>

#include <numbers>

#include "pushasep/errors.hpp"
#include "pushasep/limits.hpp"

using namespace pushasep;

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

// Reference values computed with 30-digit arithmetic.
TEST_CASE("polylogarithm") {
  CHECK(std::abs(polylog(0.5, 0.5) - 0.80612672304285226) < 1e-13);
  CHECK(std::abs(polylog(1.5, cplx(0.9, 0.3)) - cplx(1.1571389433418091, 0.84433462563586137)) < 1e-13);
  CHECK(std::abs(polylog(2.5, -0.8) - -0.71083089490285637) < 1e-13);
  CHECK(std::abs(polylog(0.5, cplx(-0.7, 0.65)) - cplx(-0.55188887525090858, 0.28640461302041173)) < 1e-13);
  CHECK(std::abs(polylog(1.5, cplx(0.99, -0.05)) - cplx(2.0114715906712799, -0.44280874797190512)) < 1e-13);
  const cplx mu(-0.3, 0.2);
  CHECK(std::abs(polylog_exp(1.5, mu) - polylog(1.5, std::exp(mu))) < 1e-13);
}

TEST_CASE("auxiliary function B") {
  CHECK(std::abs(aux_functions(0.3).B - 0.0049563759104184159) < 1e-14);
  const cplx z(1e-4, 0.0);
  CHECK(std::abs(aux_functions(z).B / (z * z) - 1.0 / (8 * pi)) < 1e-5);
}

TEST_CASE("roots xi of e^{-xi^2/2} = z") {
  const cplx z = std::polar(0.7, 2.1);
  const auto set = s_minus(z, 5);
  REQUIRE(set.xi.size() == 11);
  for (const auto& xi : set.xi) {
    CHECK(std::abs(std::exp(-xi * xi / 2.0) - z) < 1e-12);
    CHECK(xi.real() < 0.0);
  }
}

TEST_CASE("exponent") {
  const cplx xi = std::polar(1.3, 0.9 * pi);
  const double h = 1e-5;
  const cplx dx = (psi_exponent(xi, 0.4 + h, 1.5, LimitKind::Flat) - psi_exponent(xi, 0.4 - h, 1.5, LimitKind::Flat)) / (2 * h);
  CHECK(std::abs(dx - xi) < 1e-8);
  const cplx flat = psi_exponent(xi, 0.0, 0.0, LimitKind::Flat);
  const cplx step = psi_exponent(xi, 0.0, 0.0, LimitKind::Step);
  CHECK(std::abs(step - 2.0 * flat) < 1e-12);
  // d/dxi of the integral is the integrand.
  const cplx e(0.0, 1e-5);
  const cplx d = (psi_integral(xi + e) - psi_integral(xi - e)) / (2.0 * e);
  CHECK(std::abs(d - polylog(0.5, std::exp(-xi * xi / 2.0))) < 1e-7);
}

TEST_CASE("limiting distributions") {
  const LimitTables tables(LimitParams{});
  const struct {
    double x, value;
  } f1_ref[] = {{0.0, 0.901176978051}, {-2.0, 0.224473414168}, {-3.0, 0.031733245835}, {2.0, 0.999168805245}};
  for (const auto& r : f1_ref) CHECK(std::abs(tables.f1(r.x, 1.0).value - r.value) < 1e-9);
  CHECK(std::abs(tables.f2(0.0, 1.0, 0.25).value - 0.968112769192) < 1e-9);
  CHECK(std::abs(tables.f2(-3.0, 1.0, 0.25).value - 0.127998807358) < 1e-9);

  SUBCASE("periodic and even in gamma") {
    for (double x : {-1.0, 0.5}) {
      const double a = tables.f2(x, 1.0, 0.3).value;
      CHECK(std::abs(tables.f2(x, 1.0, 1.3).value - a) < 1e-10);
      CHECK(std::abs(tables.f2(x, 1.0, -0.3).value - a) < 1e-10);
    }
  }
  SUBCASE("independent of the z radius") {
    LimitParams lp;
    lp.rz = 0.8;
    lp.Mz = 512;
    const LimitTables other(lp);
    for (double x : {-1.5, 0.0, 1.0}) CHECK(std::abs(other.f1(x, 1.0).value - tables.f1(x, 1.0).value) < 1e-8);
  }
  CHECK_THROWS_AS((LimitParams{0, 256, 0.9}.validate()), ConfigError);
}

TEST_CASE("scaling constants") {
  const auto c = scaling_constants(0.5, 1.0);
  CHECK(c.v == doctest::Approx(0.25));
  CHECK(c.r == doctest::Approx(1.0));
  CHECK(std::abs(c.vshock) < 1e-15);
  CHECK(critical_density(1.0) == doctest::Approx(0.5));
  const double rc = critical_density(0.8);
  CHECK(std::abs(scaling_constants(rc, 0.8).vshock) < 1e-10);
}

TEST_CASE("scaling map") {
  const RingParams P{12, 4, 1.0};
  const auto s = scaling_map(ScalingKind::Flat, P, 1.0, 0.5);
  CHECK(s.Q == static_cast<long long>(std::ceil(s.centering - 0.5 * s.scale)));
  CHECK(s.t > 0.0);
  CHECK(s.limit_x == doctest::Approx(0.5));
}
