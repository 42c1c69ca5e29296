#include <doctest.h>

#include <numbers>

#include "pushasep/oracle.hpp"

using namespace pushasep;

TEST_CASE("transition matrix is stochastic") {
  for (double t : {0.0, 0.8, 5.0}) {
    const RingParams P{5, 2, 0.7};
    const auto T = transition_matrix(t, 1.0, P);
    for (Eigen::Index c = 0; c < T.cols(); ++c) {
      CHECK(std::abs(T.col(c).sum() - 1.0) < 1e-12);
      CHECK(T.col(c).real().minCoeff() > -1e-14);
    }
  }
  const auto T0 = transition_matrix(0.0, std::polar(1.0, 0.3), RingParams{4, 2, 0.5});
  CHECK((T0 - CMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("long time limit is uniform") {
  const RingParams P{5, 2, 0.7};
  const auto g = evolve_master({0, 1}, 60.0, 1.0, P);
  for (const auto& v : g) CHECK(std::abs(v - 0.1) < 1e-10);
}

TEST_CASE("spectrum at zeta = 1") {
  const RingParams P{5, 2, 0.7};
  const auto ev = spectrum(1.0, P);
  CHECK(ev.size() == 10);
  int zeros = 0;
  for (const auto& e : ev) {
    CHECK(e.real() < 1e-12);
    zeros += std::abs(e) < 1e-10;
  }
  CHECK(zeros == 1);
}

// Tail probabilities P(Q_{L-1}(t) >= Q) from an independent solver of the
// master equation on (configuration, local current) pairs.
TEST_CASE("local current law against frozen values") {
  const struct {
    double p;
    double tail[6];  // Q = -2..3
  } cases[] = {
      {1.0, {1.0, 1.0, 1.0, 0.02558989911592426, 6.678414721685279e-06, 2.0172880893749993e-10}},
      {0.7,
       {0.9999995510116115, 0.9995986245275555, 0.8905815309948223, 0.007705460467936958,
        4.964681898583731e-07, 3.6342491672454804e-12}},
  };
  for (const auto& c : cases) {
    const auto law = local_current_law({0, 2}, 0.5, RingParams{4, 2, c.p});
    for (int Q = -2; Q <= 3; ++Q) CHECK(std::abs(law.cdf_tail(Q) - c.tail[Q + 2]) < 1e-10);
    double total = 0.0;
    for (double v : law.pmf) total += v;
    CHECK(std::abs(total - 1.0) < 1e-10);
  }
}

TEST_CASE("joint law marginalises to the transition law") {
  const RingParams P{5, 2, 0.7};
  const auto joint = current_pmf({0, 1}, 0.7, P);
  const auto g = evolve_master({0, 1}, 0.7, 1.0, P);
  for (std::size_t x = 0; x < g.size(); ++x) {
    double s = 0.0;
    for (double v : joint.prob[x]) s += v;
    CHECK(std::abs(s - g[x].real()) < 1e-10);
  }
}
