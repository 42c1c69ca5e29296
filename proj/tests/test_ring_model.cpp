#include <doctest.h>

#include <random>

#include "pushasep/errors.hpp"
#include "pushasep/ring_model.hpp"

using namespace pushasep;

TEST_CASE("state space enumeration") {
  const RingParams P{5, 2, 0.7};
  const auto states = enumerate_states(P);
  CHECK(states.size() == 10);
  CHECK(states.front() == Configuration{0, 1});
  CHECK(states.back() == Configuration{3, 4});
  for (std::size_t i = 0; i < states.size(); ++i) CHECK(state_index(states[i], P.L) == static_cast<std::int64_t>(i));
  CHECK(state_index({1, 1}, 5) == -1);
  CHECK(binomial(8, 4) == 70);
  CHECK(binomial(3, 5) == 0);
}

TEST_CASE("occupation round trip") {
  const Configuration x{0, 3, 4};
  const auto eta = to_occupation(x, 6);
  CHECK(eta == std::vector<bool>{true, false, false, true, true, false});
  CHECK(from_occupation(eta) == x);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((RingParams{3, 5, 0.5}.validate()), ConfigError);
  CHECK_THROWS_AS((RingParams{4, 2, 1.5}.validate()), ConfigError);
  CHECK_NOTHROW((RingParams{4, 4, 1.0}.validate()));
  CHECK_FALSE(is_valid({2, 1}, 4));
  CHECK_FALSE(is_valid({0, 4}, 4));
}

TEST_CASE("predecessors") {
  const RingParams P{6, 3, 0.5};
  // Particle 2 at site 3 came from site 2.
  const auto r = predecessor_right({0, 3, 5}, 2, P);
  CHECK(r.valid);
  CHECK(r.x == Configuration{0, 2, 5});
  // Target of a right jump must have been empty before.
  CHECK_FALSE(predecessor_right({1, 2, 4}, 2, P).valid);
  // Block {2, 3} pushed left from {3, 4}.
  const auto s = predecessor_push({2, 3, 5}, 1, 2, P);
  CHECK(s.valid);
  CHECK(s.x == Configuration{3, 4, 5});
}

TEST_CASE("generator conserves probability at zeta = 1") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  for (const auto& P : {RingParams{5, 2, 0.7}, RingParams{6, 3, 0.4}, RingParams{4, 1, 1.0}}) {
    const auto dim = enumerate_states(P).size();
    CVector f(dim);
    for (auto& v : f) v = cplx(nd(gen), nd(gen));
    const auto h = apply_generator(f, 1.0, P);
    cplx sum = 0.0;
    for (const auto& v : h) sum += v;
    CHECK(std::abs(sum) < 1e-12);
  }
}

TEST_CASE("local current from the global current") {
  const RingParams P{4, 2, 0.5};
  // One right jump of the particle at 3 across edge 3: X = (0, 1) from Y = (1, 3).
  CHECK(local_from_global({0, 1}, {1, 3}, 1, 3, P) == 1);
  CHECK(local_from_global({0, 1}, {1, 3}, 1, 0, P) == 0);
  CHECK(local_from_global({1, 3}, {1, 3}, 4, 2, P) == 1);
  CHECK_THROWS_AS(local_from_global({1, 3}, {1, 3}, 1, 0, P), NumericalError);
}
