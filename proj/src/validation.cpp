#include "pushasep/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "pushasep/bethe.hpp"
#include "pushasep/contour.hpp"
#include "pushasep/current_laws.hpp"
#include "pushasep/errors.hpp"
#include "pushasep/limits.hpp"
#include "pushasep/oracle.hpp"
#include "pushasep/simulator.hpp"

namespace pushasep {

namespace {

using std::numbers::pi;

struct Part {
  std::string name;
  double value;
  double tol;
  bool pass() const { return value <= tol; }
};

CriterionResult make_result(std::string id, std::string title) {
  CriterionResult r;
  r.id = std::move(id);
  r.title = std::move(title);
  return r;
}

// Composite criteria report the worst ratio value/tol against 1.
void finish_parts(CriterionResult& r, const std::vector<Part>& parts) {
  r.pass = true;
  r.metric = 0.0;
  r.tolerance = 1.0;
  for (const auto& p : parts) {
    r.pass = r.pass && p.pass();
    r.metric = std::max(r.metric, p.tol > 0 ? p.value / p.tol : p.value);
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += fmt::format("{} {:.3g}/{:.3g}{}", p.name, p.value, p.tol, p.pass() ? "" : " FAIL");
  }
}

void finish_single(CriterionResult& r, double value, double tol) {
  r.metric = value;
  r.tolerance = tol;
  r.pass = value <= tol;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

CriterionResult ac1() {
  auto r = make_result("AC-1", "delta identity of the full contour formula");
  const RingParams P{5, 2, 0.7};
  const auto g = gf_full_table(1.0, 0.0, make_spec(P), {}, P);
  const auto dim = g.rows();
  finish_single(r, max_abs(g - Eigen::MatrixXcd::Identity(dim, dim)), 1e-6);
  r.detail = fmt::format("L=5 N=2, {} pairs", dim * dim);
  return r;
}

CriterionResult ac2() {
  auto r = make_result("AC-2", "onefold formula against the master equation");
  double worst = 0.0;
  for (auto [L, N] : {std::pair{4, 1}, {5, 2}, {7, 3}})
    for (double p : {1.0, 0.7})
      for (double t : {0.1, 1.0}) {
        const RingParams P{L, N, p};
        const auto g = gf_onefold_table(1.0, t, make_spec(P), {}, P);
        worst = std::max(worst, max_abs(g - transition_matrix(t, 1.0, P)));
      }
  finish_single(r, worst, 1e-6);
  r.detail = "(L,N) in {(4,1),(5,2),(7,3)}, p in {1,0.7}, t in {0.1,1}";
  return r;
}

CriterionResult ac3() {
  auto r = make_result("AC-3", "full, onefold and spectral formulas agree");
  const RingParams P{5, 2, 0.7};
  const cplx zeta = std::polar(1.0, pi / 5);
  const auto spec = make_spec(P);
  const auto data = prepare_spectral(zeta, P);
  const auto states = enumerate_states(P);
  double full_one = 0.0, one_spec = 0.0;
  for (double t : {0.1, 1.0}) {
    const auto g1 = gf_onefold_table(zeta, t, spec, {}, P);
    const auto g0 = gf_full_table(zeta, t, spec, {}, P);
    full_one = std::max(full_one, max_abs(g0 - g1));
    for (std::size_t a = 0; a < states.size(); ++a)
      for (std::size_t c = 0; c < states.size(); ++c)
        one_spec = std::max(one_spec, std::abs(gf_spectral(data, states[c], states[a], t) - g1(a, c)));
  }
  finish_parts(r, {{"full-onefold", full_one, 1e-6}, {"onefold-spectral", one_spec, 1e-6}});
  return r;
}

CriterionResult ac4() {
  auto r = make_result("AC-4", "stationary term u0(1)");
  double closed = 0.0, quad = 0.0;
  for (int L = 2; L <= 8; ++L)
    for (int N = 1; N <= std::min(4, L - 1); ++N) {
      const RingParams P{L, N, 0.7};
      const auto states = enumerate_states(P);
      const double target = 1.0 / static_cast<double>(binomial(L, N));
      const double radius = 0.5 * critical_radius(P);
      closed = std::max(closed, std::abs(u0(states[0], states.back(), 1.0, 0.5, ContourSpec{}, {}, P) - target));
      // All Y against a spread of X keeps the quadrature cost bounded at L = 8.
      const std::size_t stride = std::max<std::size_t>(1, states.size() / 6);
      for (const auto& y : states)
        for (std::size_t c = 0; c < states.size(); c += stride)
          quad = std::max(quad,
                          std::abs(u0_quadrature(y, states[c], 1.0, 0.5, radius, 64, P) - target));
    }
  finish_parts(r, {{"closed form", closed, 1e-10}, {"quadrature", quad, 1e-6}});
  return r;
}

CriterionResult ac5() {
  auto r = make_result("AC-5", "coupled roots exhaust the spectrum");
  const cplx zeta = std::polar(1.0, pi / 7);
  double worst = 0.0;
  bool counts = true;
  std::string detail;
  for (int L : {4, 5}) {
    const RingParams P{L, 2, 0.7};
    const auto tuples = coupled_roots(zeta, P);
    auto ev = spectrum(zeta, P);
    const bool stationary = std::abs(std::pow(zeta, L) - 1.0) < 1e-12;
    const auto found = static_cast<std::int64_t>(tuples.size()) + (stationary ? 1 : 0);
    counts = counts && found == binomial(L, 2);
    detail += fmt::format("L={}: {} of {} ", L, found, binomial(L, 2));
    std::vector<cplx> energies;
    for (const auto& t : tuples) energies.push_back(t.energy);
    if (stationary) energies.push_back(0.0);
    // Greedy matching on the closest remaining pair.
    while (!energies.empty() && !ev.empty()) {
      double best = INFINITY;
      std::size_t bi = 0, bj = 0;
      for (std::size_t i = 0; i < energies.size(); ++i)
        for (std::size_t j = 0; j < ev.size(); ++j)
          if (std::abs(energies[i] - ev[j]) < best) {
            best = std::abs(energies[i] - ev[j]);
            bi = i;
            bj = j;
          }
      worst = std::max(worst, best);
      energies.erase(energies.begin() + bi);
      ev.erase(ev.begin() + bj);
    }
    if (!ev.empty() || !energies.empty()) counts = false;
  }
  finish_single(r, worst, 1e-6);
  r.pass = r.pass && counts;
  r.detail = detail + (counts ? "" : "count mismatch");
  return r;
}

CriterionResult ac6() {
  auto r = make_result("AC-6", "current CDF against the oracle");
  double worst = 0.0, alt = 0.0;
  for (double p : {1.0, 0.7}) {
    const RingParams P{4, 2, p};
    for (const auto& y : enumerate_states(P))
      for (double t : {0.5, 2.0}) {
        const auto law = local_current_law(y, t, P);
        for (long long Q = -2; Q <= 3; ++Q) {
          const double v = current_cdf(y, Q, t, P);
          worst = std::max(worst, std::abs(v - law.cdf_tail(Q)));
          if (Q % 2 == 0) alt = std::max(alt, std::abs(current_cdf_alt(y, Q, t, P) - v));
        }
      }
  }
  finish_parts(r, {{"oracle", worst, 1e-6}, {"alternative form", alt, 1e-8}});
  return r;
}

CriterionResult ac7() {
  auto r = make_result("AC-7", "pathwise local/global current identity");
  const RingParams P{6, 3, 0.6};
  const Configuration y{0, 1, 3};
  std::int64_t violations = 0, events = 0;
  for (std::uint64_t n = 0; n < 10000; ++n) {
    const auto tr = run(y, 2.0, derive_seed(7, n), P);
    for (const auto& ev : tr.events) {
      ++events;
      std::int64_t sum = 0;
      for (int j = 0; j < P.L; ++j) {
        sum += ev.currents.edge_q[j];
        try {
          if (local_from_global(ev.state, y, ev.currents.global_q, j, P) != ev.currents.edge_q[j])
            ++violations;
        } catch (const NumericalError&) {
          ++violations;
        }
      }
      if (sum != ev.currents.global_q) ++violations;
    }
  }
  finish_single(r, static_cast<double>(violations), 0.0);
  r.detail = fmt::format("10000 trajectories, {} events, {} violations", events, violations);
  return r;
}

CriterionResult ac8() {
  auto r = make_result("AC-8", "Fredholm forms against the finite current CDF");
  double flat = 0.0, step = 0.0, radius = 0.0;
  for (double p : {1.0, 0.7}) {
    const RingParams P6{6, 2, p}, P5{5, 2, p};
    const double r6 = critical_radius(P6), r5 = critical_radius(P5);
    for (double t : {0.5, 2.0})
      for (long long Q = -2; Q <= 3; ++Q) {
        for (int delta = 0; delta < 3; ++delta) {
          const auto y = InitialCondition::flat(3, delta, P6).resolved;
          const double a = flat_cdf(3, delta, Q, t, 0.6 * r6, {}, P6);
          const double b = flat_cdf(3, delta, Q, t, 0.9 * r6, {}, P6);
          flat = std::max(flat, std::abs(a - current_cdf(y, Q, t, P6)));
          radius = std::max(radius, std::abs(a - b));
        }
        for (int which = 1; which <= 2; ++which)
          for (int shift = 0; shift <= (which == 1 ? 3 : 2); ++shift) {
            const auto y = which == 1 ? InitialCondition::step1(shift, P5).resolved
                                      : InitialCondition::step2(shift, P5).resolved;
            const double a = step_cdf(which, shift, Q, t, 0.6 * r5, {}, P5);
            const double b = step_cdf(which, shift, Q, t, 0.9 * r5, {}, P5);
            step = std::max(step, std::abs(a - current_cdf(y, Q, t, P5)));
            radius = std::max(radius, std::abs(a - b));
          }
      }
  }
  finish_parts(r, {{"flat", flat, 1e-6}, {"step", step, 1e-6}, {"radius", radius, 1e-8}});
  return r;
}

CriterionResult ac9() {
  auto r = make_result("AC-9", "method of images");
  const RingParams P{5, 2, 0.7};
  const auto states = enumerate_states(P);
  const auto T = transition_matrix(0.5, 1.0, P);
  double worst = 0.0;
  for (std::size_t c = 0; c < states.size(); ++c)
    for (std::size_t a = 0; a < states.size(); ++a) {
      const auto res = images_sum(states[c], states[a], 1.0, 0.5, 3, {}, P);
      worst = std::max(worst, std::abs(res.value - T(a, c)));
    }
  finish_single(r, worst, 1e-6);
  r.detail = "L=5 N=2 t=0.5 M_trunc=3";
  return r;
}

CriterionResult ac10() {
  auto r = make_result("AC-10", "limit laws are CDFs; F2 periodic and even; Gaussian regime");
  // At x = -6 the z-integrand reaches 1e10 against a mean near 1e-8; the
  // default outer rule cannot resolve that below the 1e-6 residue check.
  LimitParams lp;
  lp.Mz = 1024;
  lp.rz = 0.95;
  const LimitTables tables{lp};
  // Slack for non-decrease; matches the admissible CDF range [-1e-6, 1 + 1e-6].
  constexpr double kMonotoneSlack = 1e-6;
  double drop = 0.0, left = 0.0, right = 0.0;
  auto check_cdf = [&](const std::function<double(double)>& F) {
    double prev = -INFINITY;
    for (int k = 0; k <= 36; ++k) {
      const double x = -6.0 + 0.25 * k;
      const double v = F(x);
      if (k == 0) left = std::max(left, std::abs(v));
      if (k == 36) right = std::max(right, std::abs(1.0 - v));
      drop = std::max(drop, prev - v);
      prev = v;
    }
  };
  check_cdf([&](double x) { return tables.f1(x, 1.0).value; });
  check_cdf([&](double x) { return tables.f2(x, 1.0, 0.25).value; });

  double period = 0.0, even = 0.0;
  for (double x : {-2.0, 0.0, 1.0})
    for (double g : {0.25, 0.4}) {
      const double base = tables.f2(x, 1.0, g).value;
      period = std::max(period, std::abs(tables.f2(x, 1.0, g + 1.0).value - base));
      even = std::max(even, std::abs(tables.f2(x, 1.0, -g).value - base));
    }

  const double tau = 5.0;
  const double a = std::pow(pi, 0.25) / std::sqrt(2.0) * std::sqrt(tau);
  const boost::math::normal normal;
  double gauss = 0.0;
  for (int k = 0; k <= 60; ++k) {
    const double x = -3.0 + 0.1 * k;
    gauss = std::max(gauss, std::abs(tables.f1(-tau + a * x, tau).value - boost::math::cdf(normal, x)));
  }
  finish_parts(r, {{"monotone", std::max(drop, 0.0), kMonotoneSlack},
                   {"F(-6)", left, 5e-3},
                   {"1-F(3)", right, 5e-3},
                   {"F2 period", period, 1e-8},
                   {"F2 even", even, 1e-8},
                   {"Gaussian tau=5", gauss, 0.02}});
  return r;
}

CriterionResult ac11() {
  auto r = make_result("AC-11", "finite-size bridge to F1");
  constexpr double tau = 0.5;
  const LimitTables tables{LimitParams{}};
  std::map<int, double> f1_cache;  // rho = 1/3 for every N, so F1 depends on x only
  std::vector<double> sup;
  for (int N : {4, 6, 8}) {
    const RingParams P{3 * N, N, 1.0};
    const double radius = 0.97 * critical_radius(P);
    QuadratureBudget budget;
    budget.nodes_z = 256;
    std::map<long long, double> finite;
    double s = 0.0;
    for (int k = 0; k <= 300; ++k) {
      const double x = -3.0 + 0.02 * k;
      const auto pt = scaling_map(ScalingKind::Flat, P, tau, x);
      if (!finite.count(pt.Q)) finite[pt.Q] = flat_cdf(3, 0, pt.Q, pt.t, radius, budget, P);
      if (!f1_cache.count(k)) f1_cache[k] = tables.f1(pt.limit_x, pt.limit_tau).value;
      s = std::max(s, std::abs(finite[pt.Q] - f1_cache[k]));
    }
    sup.push_back(s);
  }
  r.pass = sup[1] < sup[0] && sup[2] < sup[1];
  r.metric = std::max(sup[1] - sup[0], sup[2] - sup[1]);
  r.tolerance = 0.0;
  r.detail = fmt::format("sup-distance N=4: {:.4f}, N=6: {:.4f}, N=8: {:.4f}", sup[0], sup[1], sup[2]);
  return r;
}

CriterionResult ac12() {
  auto r = make_result("AC-12", "series toolkit");
  const long long expected[] = {1, 2, 5, 14};
  double fc = 0.0;
  for (int m = 0; m <= 3; ++m) {
    const Rational v = fuss_catalan(Rational(2), Rational(2), m);
    fc = std::max(fc, std::abs(boost::rational_cast<double>(v) - expected[m]));
  }

  const RingParams P{4, 2, 0.7};
  double lead = 0.0;
  for (double arg : {0.0, 0.3}) {
    const cplx z = std::polar(0.15, arg);
    const cplx c = (psi_product(z, P) - 1.0) / ipow(z, 4);
    lead = std::max(lead, std::abs(c - 6.0) / 6.0);
  }

  // Error of the truncated Q1 root series at |z| and |z|/2.
  constexpr int M = 2;
  auto series_error = [&](double zr) {
    const auto set = q_roots(zr, P);
    double best = INFINITY;
    for (int k = 0; k < P.N; ++k) {
      const cplx ph = phi_expansion(zr, std::polar(1.0, 2 * pi * k / P.N), M, P);
      for (int i : set.q1) best = std::min(best, std::abs(ph - (1.0 - 1.0 / set.roots[i])));
    }
    return best;
  };
  const double slope = std::log2(series_error(0.1) / series_error(0.05));
  const double target = P.d() * (M + 1);
  finish_parts(r, {{"Fuss-Catalan", fc, 0.0},
                   {"Psi leading coefficient", lead, 0.02},
                   {fmt::format("slope {:.3f} vs {}", slope, target), std::abs(slope - target) / target,
                    0.1}});
  return r;
}

CriterionResult ac13() {
  auto r = make_result("AC-13", "Monte Carlo concordance");
  const RingParams P{5, 2, 0.7};
  const Configuration y{0, 1};
  constexpr std::int64_t trials = 100000;
  const auto table = empirical_transition(y, 1.0, trials, 1, P);
  const auto T = transition_matrix(1.0, 1.0, P);
  const auto col = state_index(y, P.L);
  // Deviation in units of the binomial standard error at the exact value.
  auto zscore = [&](double est, double exact) {
    const double se = std::sqrt(std::max(exact * (1 - exact), est * (1 - est)) / trials);
    const double dev = std::abs(est - exact);
    return dev < 1e-12 ? 0.0 : dev / se;
  };
  double worst = 0.0;
  for (std::size_t s = 0; s < table.states.size(); ++s)
    worst = std::max(worst, zscore(table.prob[s], T(s, col).real()));
  const auto law = empirical_current_law(y, 1.0, trials, 2, P);
  double worst_cdf = 0.0;
  for (long long Q : {-1, 0, 1})
    worst_cdf = std::max(worst_cdf, zscore(law.tail(Q).value, current_cdf(y, Q, 1.0, P)));
  finish_parts(r, {{"transition z", worst, 4.0}, {"current CDF z", worst_cdf, 4.0}});
  return r;
}

const std::vector<std::pair<std::string, std::function<CriterionResult()>>>& registry() {
  static const std::vector<std::pair<std::string, std::function<CriterionResult()>>> table = {
      {"AC-1", ac1},   {"AC-2", ac2},   {"AC-3", ac3},   {"AC-4", ac4},   {"AC-5", ac5},
      {"AC-6", ac6},   {"AC-7", ac7},   {"AC-8", ac8},   {"AC-9", ac9},   {"AC-10", ac10},
      {"AC-11", ac11}, {"AC-12", ac12}, {"AC-13", ac13}};
  return table;
}

}  // namespace

std::vector<std::string> criterion_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, fn] : registry()) ids.push_back(id);
  return ids;
}

CriterionResult run_criterion(const std::string& id) {
  for (const auto& [name, fn] : registry()) {
    if (name != id) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = make_result(id, "");
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }
  throw ConfigError("unknown criterion: " + id);
}

std::vector<CriterionResult> run_acceptance(const std::string& profile,
                                            const std::vector<std::string>& ids) {
  if (profile != "desk") throw ConfigError("unknown profile: " + profile);
  std::vector<CriterionResult> out;
  for (const auto& id : ids.empty() ? criterion_ids() : ids) out.push_back(run_criterion(id));
  return out;
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("{:<6} {} metric={:.3e} tol={:.3e} ({:.1f}s) {}", r.id, r.pass ? "PASS" : "FAIL",
                     r.metric, r.tolerance, r.seconds, r.detail);
}

}  // namespace pushasep
