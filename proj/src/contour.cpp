#include "pushasep/contour.hpp"

#include <tbb/parallel_for.h>

#include <cmath>
#include <numbers>
#include <string>

#include "pushasep/errors.hpp"

namespace pushasep {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx node(int m, int M) { return std::polar(1.0, kTwoPi * (m + 0.5) / M); }

bool root_of_unity_power(cplx zeta, int L) { return std::abs(ipow(zeta, L) - 1.0) < 1e-12; }

// Powers of one root that enter h and u.
struct RootCache {
  cplx lam;
  std::vector<cplx> neg;  // lam^{-x}, x = 0..L-1
  std::vector<cplx> pos;  // lam^{y}, y = 0..L-1
  std::vector<cplx> a;    // (1 - 1/lam)^k, k = -(N-1)..(N-1)

  RootCache(cplx l, int L, int N) : lam(l), neg(L), pos(L), a(2 * N - 1) {
    const cplx inv = 1.0 / l;
    neg[0] = pos[0] = 1.0;
    for (int x = 1; x < L; ++x) {
      neg[x] = neg[x - 1] * inv;
      pos[x] = pos[x - 1] * l;
    }
    const cplx base = 1.0 - inv;
    for (int k = -(N - 1); k <= N - 1; ++k) a[k + N - 1] = ipow(base, k);
  }
  cplx apow(int k, int N) const { return a[k + N - 1]; }
};

cplx small_det(const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>& m) {
  switch (m.rows()) {
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default: return m.determinant();
  }
}

// Sums w_k u_k(X) h_k(Y) over tuples k; chunks are folded in with a matrix product.
class TableAccumulator {
 public:
  TableAccumulator(const std::vector<Configuration>& xs, const std::vector<Configuration>& ys,
                   int N)
      : xs_(xs), ys_(ys), n_(N), u_(xs.size(), kChunk), h_(ys.size(), kChunk),
        acc_(Eigen::MatrixXcd::Zero(xs.size(), ys.size())) {}

  void add(const std::vector<const RootCache*>& roots, cplx w) {
    const int N = n_;
    if (N > 4) throw ConfigError("tuple accumulation supports N <= 4");
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4> m(N, N);
    for (std::size_t a = 0; a < xs_.size(); ++a) {
      const auto& x = xs_[a];
      for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) m(i, j) = roots[j]->apow(j - i, N) * roots[j]->neg[x[i]];
      u_(a, fill_) = small_det(m);
    }
    for (std::size_t b = 0; b < ys_.size(); ++b) {
      cplx h = w;
      for (int j = 0; j < N; ++j) h *= roots[j]->pos[ys_[b][j]];
      h_(b, fill_) = h;
    }
    if (++fill_ == kChunk) flush();
  }

  const Eigen::MatrixXcd& result() {
    flush();
    return acc_;
  }

 private:
  static constexpr int kChunk = 512;
  void flush() {
    if (fill_ == 0) return;
    acc_.noalias() += u_.leftCols(fill_) * h_.leftCols(fill_).transpose();
    fill_ = 0;
  }
  const std::vector<Configuration>& xs_;
  const std::vector<Configuration>& ys_;
  int n_;
  Eigen::MatrixXcd u_, h_, acc_;
  int fill_ = 0;
};

void check_states(const std::vector<Configuration>& v, const RingParams& params) {
  for (const auto& c : v)
    if (static_cast<int>(c.size()) != params.N || !is_valid(c, params.L))
      throw ConfigError("invalid configuration");
}

void check_zeta(cplx zeta) {
  if (std::abs(std::abs(zeta) - 1.0) > 1e-12) throw ConfigError("zeta must lie on the unit circle");
}

// Sum over nodes in a fixed order.
Eigen::MatrixXcd ordered_sum(const std::vector<Eigen::MatrixXcd>& parts) {
  std::vector<Eigen::MatrixXcd> level(parts);
  while (level.size() > 1) {
    std::vector<Eigen::MatrixXcd> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(level[i] + level[i + 1]);
    if (level.size() % 2) next.push_back(level.back());
    level.swap(next);
  }
  return level.front();
}

void apply_zeta_shift(Eigen::MatrixXcd& g, const std::vector<Configuration>& xs,
                      const std::vector<Configuration>& ys, cplx zeta) {
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t b = 0; b < ys.size(); ++b) g(a, b) *= zeta_shift(ys[b], xs[a], zeta);
}

cplx stationary_u0(cplx zeta, const RingParams& params) {
  return root_of_unity_power(zeta, params.L) ? 1.0 / static_cast<double>(binomial(params.L, params.N))
                                             : 0.0;
}

Eigen::MatrixXcd full_impl(const std::vector<Configuration>& xs,
                           const std::vector<Configuration>& ys, cplx zeta, double t,
                           const ContourSpec& spec, const QuadratureBudget& budget,
                           const RingParams& params) {
  params.validate();
  budget.validate();
  check_zeta(zeta);
  check_states(xs, params);
  check_states(ys, params);
  if (params.N > 3) throw ConfigError("the (N+1)-fold integral is limited to N <= 3");
  const int L = params.L, N = params.N, Mz = budget.nodes_z, Mw = budget.nodes_w;
  const cplx zl = ipow(zeta, L);
  const double sgn = N % 2 ? -1.0 : 1.0;

  struct WCircle {
    cplx center;
    double radius, sign;
  };
  const WCircle wc[3] = {{0.0, spec.R, 1.0}, {0.0, spec.eps1, -1.0}, {1.0, spec.eps2, -1.0}};

  std::vector<Eigen::MatrixXcd> parts(2 * Mz);
  tbb::parallel_for(0, 2 * Mz, [&](int k) {
    const bool outer = k < Mz;
    const double rz = outer ? spec.R_prime : spec.eps_prime;
    const cplx z = rz * node(k % Mz, Mz);
    const cplx s = ipow(z, L);
    std::vector<RootCache> caches;
    std::vector<cplx> weights, mus;
    for (const auto& c : wc) {
      for (int m = 0; m < Mw; ++m) {
        const cplx w = c.center + c.radius * node(m, Mw);
        const cplx qz = 1.0 - s / q_poly(w, params);
        const cplx e = params.p * w + params.q() / w - 1.0;
        caches.emplace_back(w, L, N);
        weights.push_back(c.sign * (w - c.center) / (w * static_cast<double>(Mw)) *
                          std::exp(t * e) / qz);
        mus.push_back(1.0 - 1.0 / w);
      }
    }
    const int nw = static_cast<int>(caches.size());
    TableAccumulator acc(xs, ys, N);
    std::vector<int> idx(N, 0);
    std::vector<const RootCache*> tuple(N);
    while (true) {
      cplx w = 1.0, prod = 1.0;
      for (int i = 0; i < N; ++i) {
        tuple[i] = &caches[idx[i]];
        w *= weights[idx[i]];
        prod *= mus[idx[i]];
      }
      const cplx pz = 1.0 + sgn * zl / s * prod;
      acc.add(tuple, w / pz);
      int i = N - 1;
      while (i >= 0 && idx[i] == nw - 1) idx[i--] = 0;
      if (i < 0) break;
      ++idx[i];
    }
    parts[k] = acc.result() * ((outer ? 1.0 : -1.0) / Mz);
  });
  Eigen::MatrixXcd g = ordered_sum(parts);
  apply_zeta_shift(g, xs, ys, zeta);
  return g;
}

Eigen::MatrixXcd onefold_impl(const std::vector<Configuration>& xs,
                              const std::vector<Configuration>& ys, cplx zeta, double t,
                              const ContourSpec& spec, const QuadratureBudget& budget,
                              const RingParams& params) {
  params.validate();
  budget.validate();
  check_zeta(zeta);
  check_states(xs, params);
  check_states(ys, params);
  const int L = params.L, N = params.N, Mz = budget.nodes_z;
  std::vector<Eigen::MatrixXcd> parts(2 * Mz);
  std::vector<double> closest(2 * Mz, 1e300);
  tbb::parallel_for(0, 2 * Mz, [&](int k) {
    const bool outer = k < Mz;
    const double rz = outer ? spec.R_prime : spec.eps_prime;
    const cplx z = rz * node(k % Mz, Mz);
    const CVector roots = q_polynomial_roots(ipow(z, L), params);
    std::vector<RootCache> caches;
    std::vector<cplx> single;
    for (const auto& l : roots) {
      caches.emplace_back(l, L, N);
      single.push_back(std::exp(t * (params.p * l + params.q() / l - 1.0)) / lambda_qprime(l, params));
    }
    TableAccumulator acc(xs, ys, N);
    std::vector<const RootCache*> tuple(N);
    CVector lam(N);
    for_each_arrangement(L, N, [&](const std::vector<int>& idx) {
      cplx w = 1.0;
      for (int i = 0; i < N; ++i) {
        tuple[i] = &caches[idx[i]];
        lam[i] = roots[idx[i]];
        w *= single[idx[i]];
      }
      const cplx pz = p_coupling(lam, z, zeta, params);
      closest[k] = std::min(closest[k], std::abs(pz));
      acc.add(tuple, w / pz);
    });
    parts[k] = acc.result() * ((outer ? 1.0 : -1.0) / Mz);
  });
  for (double c : closest)
    if (c < 1e-10) throw NumericalError("a quadrature node lies on a coupled root");
  Eigen::MatrixXcd g = ordered_sum(parts);
  apply_zeta_shift(g, xs, ys, zeta);
  return g;
}

}  // namespace

void QuadratureBudget::validate() const {
  if (nodes_z < 16 || nodes_z % 2) throw ConfigError("nodes_z must be even and at least 16");
  if (nodes_w < 16 || nodes_w % 2) throw ConfigError("nodes_w must be even and at least 16");
}

ContourSpec make_spec(const RingParams& params, double eps_prime, const SpecOverrides& ov) {
  params.validate();
  const int L = params.L, N = params.N;
  if (2 * N > L) throw ConfigError("contour conditions require 2N <= L");
  if (!(eps_prime > 0.0 && eps_prime < 1.0)) throw ConfigError("eps' must lie in (0, 1)");
  ContourSpec s;
  s.eps_prime = eps_prime;
  s.variant = 2 * N == L ? ContourVariant::CondPrime : ContourVariant::Cond;
  const double d = static_cast<double>(L) / N;
  const double b1lo = static_cast<double>(L) / (L - N), b1hi = d;
  const double b2lo = d;
  const double b2hi = N > 1 ? static_cast<double>(L) / (N - 1) : HUGE_VAL;

  s.beta = ov.beta.value_or(1.5);
  s.beta1 = ov.beta1.value_or(0.5 * (b1lo + b1hi));
  s.beta2 = ov.beta2.value_or(N > 1 ? 0.5 * (b2lo + b2hi) : d + 1.0);
  if (!(s.beta > 1.0)) throw ConfigError("Cond: beta must exceed 1");
  if (s.variant == ContourVariant::Cond) {
    if (!(s.beta1 > b1lo && s.beta1 < b1hi))
      throw ConfigError("Cond: beta1 must satisfy L/(L-N) < beta1 < L/N");
  } else if (!(s.beta1 >= b1lo - 1e-15 && s.beta1 <= b1hi + 1e-15)) {
    throw ConfigError("Cond': beta1 must satisfy L/(L-N) <= beta1 <= L/N");
  }
  if (!(s.beta2 > b2lo && s.beta2 < b2hi))
    throw ConfigError("Cond: beta2 must satisfy L/N < beta2 < L/(N-1)");

  if (s.variant == ContourVariant::Cond) {
    if (ov.alpha0 || ov.alpha1) throw ConfigError("alpha0/alpha1 apply only to Cond'");
    s.R_prime = 1.0 / eps_prime;
    s.eps1 = std::pow(eps_prime, s.beta1);
  } else {
    const double a1max = std::pow(2.0, -static_cast<double>(N) / (L - N));
    s.alpha1 = ov.alpha1.value_or(0.5 * a1max);
    if (!(s.alpha1 > 0.0 && s.alpha1 < a1max))
      throw ConfigError("Cond': alpha1 must satisfy 0 < alpha1 < 2^{-N/(L-N)}");
    s.eps1 = s.alpha1 * std::pow(eps_prime, s.beta1);
    const double need = (1.0 + s.eps1) * (1.0 + std::pow(s.eps1, N - 1));
    s.alpha0 = ov.alpha0.value_or(1.25 * std::pow(need / std::pow(s.alpha1, N), 1.0 / L));
    if (!(need < std::pow(s.alpha0, L) * std::pow(s.alpha1, N)))
      throw ConfigError("Cond': (1+eps1)(1+eps1^{N-1}) < alpha0^L alpha1^N fails");
    s.R_prime = s.alpha0 / eps_prime;
  }
  s.R = std::pow(s.R_prime, s.beta);
  s.eps2 = std::pow(eps_prime, s.beta2);
  return s;
}

cplx circle_quadrature(cplx center, double radius, int M, const std::function<cplx(cplx)>& f,
                       Measure measure) {
  if (M < 2 || M % 2) throw ConfigError("node count must be even");
  std::vector<cplx> vals(M);
  tbb::parallel_for(0, M, [&](int m) {
    const cplx e = node(m, M);
    const cplx z = center + radius * e;
    const cplx v = f(z);
    // dz / (2 pi i) = (z - center) dtheta / 2 pi.
    vals[m] = measure == Measure::DzOverZ ? v * (radius * e) / z : v * radius * e;
  });
  while (vals.size() > 1) {
    std::vector<cplx> next;
    for (std::size_t i = 0; i + 1 < vals.size(); i += 2) next.push_back(vals[i] + vals[i + 1]);
    if (vals.size() % 2) next.push_back(vals.back());
    vals.swap(next);
  }
  return vals.front() / static_cast<double>(M);
}

cplx zeta_shift(const std::vector<int>& y, const std::vector<int>& x, cplx zeta) {
  long long sh = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sh += x[i] - y[i];
  return ipow(zeta, sh);
}

cplx gf_full(const Configuration& y, const Configuration& x, cplx zeta, double t,
             const ContourSpec& spec, const QuadratureBudget& budget, const RingParams& params) {
  return full_impl({x}, {y}, zeta, t, spec, budget, params)(0, 0);
}

GfTable gf_full_table(cplx zeta, double t, const ContourSpec& spec, const QuadratureBudget& budget,
                      const RingParams& params) {
  const auto states = enumerate_states(params);
  return full_impl(states, states, zeta, t, spec, budget, params);
}

cplx u0_quadrature(const Configuration& y, const Configuration& x, cplx zeta, double t,
                   double radius, int nodes, const RingParams& params) {
  params.validate();
  check_zeta(zeta);
  const int N = params.N;
  if (!(radius > 0 && radius < critical_radius(params)))
    throw ConfigError("u0 quadrature radius must lie in (0, r0)");
  const cplx v = circle_quadrature(0.0, radius, nodes, [&](cplx z) {
    const auto set = q_roots(z, params);
    cplx acc = 0.0;
    CVector lam(N);
    for_each_arrangement(N, N, [&](const std::vector<int>& idx) {
      cplx w = 1.0;
      for (int i = 0; i < N; ++i) {
        lam[i] = set.roots[set.q1[idx[i]]];
        w *= std::exp(t * (params.p * lam[i] + params.q() / lam[i] - 1.0)) /
             lambda_qprime(lam[i], params);
      }
      acc += w * bethe_h(lam, y) * bethe_u(lam, x) / p_coupling(lam, z, zeta, params);
    });
    return acc;
  });
  return v * zeta_shift(y, x, zeta);
}

cplx u0(const Configuration& y, const Configuration& x, cplx zeta, double t,
        const ContourSpec& spec, const QuadratureBudget& budget, const RingParams& params) {
  params.validate();
  check_zeta(zeta);
  if (root_of_unity_power(zeta, params.L)) return stationary_u0(zeta, params);
  return u0_quadrature(y, x, zeta, t, spec.eps_prime, budget.nodes_z, params);
}

cplx gf_onefold(const Configuration& y, const Configuration& x, cplx zeta, double t,
                const ContourSpec& spec, const QuadratureBudget& budget, const RingParams& params) {
  const cplx base = onefold_impl({x}, {y}, zeta, t, spec, budget, params)(0, 0);
  return base + u0(y, x, zeta, t, spec, budget, params);
}

GfTable gf_onefold_table(cplx zeta, double t, const ContourSpec& spec,
                         const QuadratureBudget& budget, const RingParams& params) {
  const auto states = enumerate_states(params);
  GfTable g = onefold_impl(states, states, zeta, t, spec, budget, params);
  if (root_of_unity_power(zeta, params.L)) {
    g.array() += stationary_u0(zeta, params);
  } else {
    for (std::size_t a = 0; a < states.size(); ++a)
      for (std::size_t b = 0; b < states.size(); ++b)
        g(a, b) += u0(states[b], states[a], zeta, t, spec, budget, params);
  }
  return g;
}

SpectralData prepare_spectral(cplx zeta, const RingParams& params, const CoupledRootOptions& opt) {
  SpectralData d{params, zeta, coupled_roots(zeta, params, opt), root_of_unity_power(zeta, params.L)};
  for (const auto& tup : d.tuples)
    if (std::abs(r_coefficient(tup.lambdas, params)) < 1e-8)
      throw NumericalError("degenerate zeta: r(lambda) vanishes for a coupled root");
  return d;
}

cplx r_coefficient(const CVector& lambdas, const RingParams& params) {
  cplx r = static_cast<double>(params.L);
  for (const auto& l : lambdas) r -= 1.0 / (l - (1.0 - params.rho()));
  return r;
}

cplx gf_spectral(const SpectralData& data, const Configuration& y, const Configuration& x,
                 double t) {
  const auto& params = data.params;
  const int N = params.N;
  cplx total = 0.0;
  CVector lam(N);
  for (const auto& tup : data.tuples) {
    const cplx r = r_coefficient(tup.lambdas, params);
    cplx denom = r;
    for (const auto& l : tup.lambdas) denom *= lambda_qprime(l, params);
    const cplx weight = static_cast<double>(params.L) * std::exp(t * tup.energy) / denom;
    for_each_arrangement(N, N, [&](const std::vector<int>& idx) {
      for (int i = 0; i < N; ++i) lam[i] = tup.lambdas[idx[i]];
      total += weight * bethe_h(lam, y) * bethe_u(lam, x);
    });
  }
  return stationary_u0(data.zeta, params) + total * zeta_shift(y, x, data.zeta);
}

cplx gf_spectral(const Configuration& y, const Configuration& x, cplx zeta, double t,
                 const RingParams& params) {
  return gf_spectral(prepare_spectral(zeta, params), y, x, t);
}

}  // namespace pushasep
