#include <doctest.h>

#include <random>

#include "pushasep/current_laws.hpp"
#include "pushasep/errors.hpp"

using namespace pushasep;

namespace {

cplx energy_factor(cplx lam, double t, const RingParams& P) {
  return std::exp(t * (P.p * lam + P.q() / lam - 1.0));
}

}  // namespace

TEST_CASE("column-sum determinant equals the tuple sum") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  CVector roots(5);
  for (auto& r : roots) r = cplx(nd(gen), nd(gen));
  const ColumnEntry entry = [](int i, int j, cplx l) { return ipow(l, i + 2 * j) + static_cast<double>(i - j); };
  const int N = 3;
  cplx brute = 0.0;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int c = 0; c < 5; ++c) {
        Eigen::Matrix3cd M;
        const int idx[3] = {a, b, c};
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) M(i, j) = entry(i, j, roots[idx[j]]);
        brute += M.determinant();
      }
  CHECK(std::abs(colsum_det(entry, roots, N) - brute) < 1e-9 * std::abs(brute));
}

TEST_CASE("factorisation of q_z") {
  const RingParams P{7, 3, 0.6};
  const cplx z = std::polar(0.6 * critical_radius(P), 0.8);
  const auto set = q_roots(z, P);
  const cplx w(0.4, 1.7);
  const auto f = qz_factors(w, set);
  CHECK(std::abs(f.q0 * f.q1 - (q_poly(w, P) - ipow(z, 7))) < 1e-11);
  for (int i : set.q1) {
    const cplx v = set.roots[i];
    CHECK(std::abs(qz_factors(v, set).q0 * q1_derivative(i, set) - q_poly_derivative(v, P)) < 1e-11);
  }
}

// Values of P(Q_{L-1}(t) >= Q) from an independent solver of the master
// equation on (configuration, local current) pairs.
TEST_CASE("current distribution against frozen values") {
  SUBCASE("L=4 N=2 p=1") {
    const RingParams P{4, 2, 1.0};
    const double v[] = {1.0, 0.02558989911592426, 6.678414721685279e-06, 2.0172880893749993e-10};
    for (int Q = 0; Q <= 3; ++Q) CHECK(std::abs(current_cdf({0, 2}, Q, 0.5, P) - v[Q]) < 1e-10);
    CHECK(std::abs(current_cdf({0, 2}, -1, 0.5, P) - 1.0) < 1e-10);
  }
  SUBCASE("L=4 N=2 p=0.7") {
    const RingParams P{4, 2, 0.7};
    const double v[] = {0.9999995510116115, 0.9995986245275555, 0.8905815309948223, 0.007705460467936958,
                        4.964681898583731e-07, 3.6342491672454804e-12};
    for (int Q = -2; Q <= 3; ++Q) CHECK(std::abs(current_cdf({0, 2}, Q, 0.5, P) - v[Q + 2]) < 1e-10);
    for (int Q : {-2, 0, 2}) CHECK(std::abs(current_cdf_alt({0, 2}, Q, 0.5, P) - v[Q + 2]) < 1e-10);
    CHECK_THROWS_AS(current_cdf_alt({0, 2}, 1, 0.5, P), ConfigError);
  }
  SUBCASE("L=5 N=2 p=0.7") {
    const RingParams P{5, 2, 0.7};
    const double v[] = {0.9803385266636715, 0.6672085892140125, 0.0011776487205900565};
    for (int Q = -1; Q <= 1; ++Q) CHECK(std::abs(current_cdf({0, 1}, Q, 1.0, P) - v[Q + 1]) < 1e-10);
  }
}

TEST_CASE("current distribution is monotone and radius independent") {
  const RingParams P{6, 3, 0.8};
  const Configuration y{0, 1, 4};
  double prev = 2.0;
  for (int Q = -4; Q <= 5; ++Q) {
    const double c = current_cdf(y, Q, 1.2, P);
    CHECK(c <= prev + 1e-12);
    CHECK(c >= -1e-12);
    CHECK(std::abs(c - current_cdf(y, Q, 1.2, P, 1.1, 96)) < 1e-10);
    prev = c;
  }
}

TEST_CASE("restricted sum over Q1 is a sign") {
  for (auto [L, N] : {std::pair{4, 2}, {6, 3}, {5, 2}}) {
    const RingParams P{L, N, 0.7};
    Configuration y;
    for (int i = 0; i < N; ++i) y.push_back(2 * i % L);
    std::sort(y.begin(), y.end());
    const double r = 0.5 * critical_radius(P);
    for (int Q = -1; Q <= 2; ++Q) {
      const cplx v = circle_quadrature(0.0, r, 128, [&](cplx z) {
        const auto set = q_roots(z, P);
        CVector lam;
        for (int i : set.q1) lam.push_back(set.roots[i]);
        cplx acc = 0.0;
        for_each_arrangement(N, N, [&](const std::vector<int>& idx) {
          Eigen::MatrixXcd M(N, N);
          cplx pr = 1.0;
          for (int j = 0; j < N; ++j) {
            const cplx l = lam[idx[j]];
            for (int i = 0; i < N; ++i)
              M(i, j) = ipow(1.0 - 1.0 / l, j - i - 1) * ipow(l, y[j] + 1) * energy_factor(l, 0.3, P) /
                        (static_cast<double>(L) * l - static_cast<double>(L - N));
            pr *= ipow(1.0 - 1.0 / l, Q + 1);
          }
          acc += M.determinant() * pr;
        });
        return acc * ipow(z, -static_cast<long long>(Q) * L);
      });
      const double sign = ((N + 1) * Q) % 2 ? -1.0 : 1.0;
      CHECK(std::abs(v - sign) < 1e-8);
    }
  }
}

TEST_CASE("flat and step formulas agree with the general formula") {
  const QuadratureBudget budget{};
  SUBCASE("flat") {
    const RingParams P{6, 2, 0.8};
    const double r = 0.6 * critical_radius(P);
    for (int delta : {0, 2})
      for (int Q : {-1, 0, 1, 2}) {
        const auto y = InitialCondition::flat(3, delta, P).resolved;
        CHECK(std::abs(flat_cdf(3, delta, Q, 0.9, r, budget, P) - current_cdf(y, Q, 0.9, P)) < 1e-9);
      }
  }
  SUBCASE("step") {
    const RingParams P{7, 3, 0.6};
    const double r = 0.6 * critical_radius(P);
    for (int Q : {-1, 0, 1}) {
      CHECK(std::abs(step_cdf(1, 2, Q, 0.9, r, budget, P) -
                     current_cdf(InitialCondition::step1(2, P).resolved, Q, 0.9, P)) < 1e-9);
      CHECK(std::abs(step_cdf(2, 1, Q, 0.9, r, budget, P) -
                     current_cdf(InitialCondition::step2(1, P).resolved, Q, 0.9, P)) < 1e-9);
    }
  }
}

TEST_CASE("initial conditions") {
  const RingParams P{8, 4, 0.5};
  CHECK(InitialCondition::flat(2, 1, P).resolved == Configuration{1, 3, 5, 7});
  CHECK(InitialCondition::step1(3, P).resolved == Configuration{3, 4, 5, 6});
  CHECK(InitialCondition::step2(1, P).resolved == Configuration{0, 5, 6, 7});
  CHECK_THROWS_AS(InitialCondition::flat(3, 0, P), ConfigError);
}

TEST_CASE("periodic shifts of the initial condition") {
  const RingParams P{4, 2, 0.5};
  CHECK(shifted_initial({0, 2}, 0, P) == std::vector<int>{0, 2});
  CHECK(shifted_initial({0, 2}, 1, P) == std::vector<int>{-2, 0});
  CHECK(shifted_initial({0, 2}, 2, P) == std::vector<int>{-4, -2});
  CHECK(shifted_initial({0, 2}, -1, P) == std::vector<int>{2, 4});
}

TEST_CASE("transition probability with winding at t = 0") {
  const RingParams P{5, 2, 0.7};
  const QuadratureBudget budget{96, 64};
  CHECK(std::abs(u_bl({0, 2}, {0, 2}, 0.0, budget, P) - 1.0) < 1e-8);
  CHECK(std::abs(u_bl({0, 2}, {1, 2}, 0.0, budget, P)) < 1e-8);
  CHECK(std::abs(u_bl({0, 2}, {-5, -3}, 0.0, budget, P)) < 1e-8);
  CHECK_THROWS_AS(u_bl({0, 2}, {1, 2}, 0.1, budget, P, 0.1), ConfigError);
}
