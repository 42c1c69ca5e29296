#include <doctest.h>

#include "pushasep/current_laws.hpp"
#include "pushasep/errors.hpp"
#include "pushasep/oracle.hpp"
#include "pushasep/simulator.hpp"

using namespace pushasep;

TEST_CASE("full ring with p = 1 is frozen") {
  const RingParams P{4, 4, 1.0};
  const auto tr = run({0, 1, 2, 3}, 10.0, 5, P);
  CHECK(tr.events.empty());
  CHECK(tr.currents.global_q == 0);
}

TEST_CASE("runs are reproducible") {
  const RingParams P{7, 3, 0.6};
  const auto a = run({0, 1, 4}, 5.0, 42, P);
  const auto b = run({0, 1, 4}, 5.0, 42, P);
  REQUIRE(a.events.size() == b.events.size());
  CHECK(a.final == b.final);
  CHECK(a.currents.edge_q == b.currents.edge_q);
  CHECK(derive_seed(42, 0) != derive_seed(42, 1));
  CHECK(derive_seed(42, 3) == derive_seed(42, 3));
  const auto e1 = empirical_current_law({0, 1, 4}, 1.0, 3000, 9, P);
  const auto e2 = empirical_current_law({0, 1, 4}, 1.0, 3000, 9, P);
  CHECK(e1.counts == e2.counts);
}

TEST_CASE("edge currents are consistent with the events") {
  const RingParams P{6, 3, 0.5};
  const auto tr = run({0, 1, 3}, 20.0, 3, P);
  std::int64_t sum = 0;
  for (auto q : tr.currents.edge_q) sum += q;
  CHECK(sum == tr.currents.global_q);
  for (int j = 0; j < P.L; ++j)
    CHECK(tr.currents.edge_q[j] == local_from_global(tr.final, {0, 1, 3}, tr.currents.global_q, j, P));
}

TEST_CASE("empirical transition law") {
  const RingParams P{5, 2, 0.7};
  SUBCASE("point mass at t = 0") {
    const auto d = empirical_transition({1, 3}, 0.0, 100, 1, P);
    for (std::size_t i = 0; i < d.states.size(); ++i) CHECK(d.prob[i] == (d.states[i] == Configuration{1, 3} ? 1.0 : 0.0));
  }
  SUBCASE("uniform at long times") {
    const auto d = empirical_transition({0, 1}, 50.0, 20000, 2, P);
    for (std::size_t i = 0; i < d.prob.size(); ++i) CHECK(std::abs(d.prob[i] - 0.1) < 4 * d.stderr_[i]);
  }
  SUBCASE("agrees with the master equation") {
    const auto d = empirical_transition({0, 1}, 0.8, 20000, 3, P);
    const auto g = evolve_master({0, 1}, 0.8, 1.0, P);
    for (std::size_t i = 0; i < d.prob.size(); ++i)
      CHECK(std::abs(d.prob[i] - g[i].real()) < 4 * std::max(d.stderr_[i], 1e-3));
  }
}

TEST_CASE("single particle jumps at unit rate") {
  // The global current is a difference of Poisson(p t) and Poisson(q t).
  const RingParams P{5, 1, 0.7};
  const double t = 2.0;
  const int n = 20000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto q = static_cast<double>(run({0}, t, derive_seed(8, i), P, false).currents.global_q);
    s1 += q;
    s2 += q * q;
  }
  const double mean = s1 / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean - (P.p - P.q()) * t) < 4 * std::sqrt(t / n));
  CHECK(std::abs(var - t) < 0.1);
}

TEST_CASE("local current law against the exact formula") {
  const RingParams P{6, 2, 0.8};
  for (int Q : {0, 1}) {
    const auto e = empirical_current_cdf({1, 4}, 1.0, Q, 20000, 1, P);
    CHECK(std::abs(e.value - current_cdf({1, 4}, Q, 1.0, P)) < 4 * std::max(e.stderr_, 1e-3));
  }
}

TEST_CASE("invalid inputs") {
  const RingParams P{5, 2, 0.7};
  CHECK_THROWS_AS(run({0, 0}, 1.0, 1, P), ConfigError);
  CHECK_THROWS_AS(run({0, 1}, -1.0, 1, P), ConfigError);
  CHECK_THROWS_AS(empirical_transition({0, 1}, 1.0, 0, 1, P), ConfigError);
}
