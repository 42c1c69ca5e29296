#include "pushasep/bethe.hpp"

#include <tbb/parallel_for.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/Polynomials>

#include "pushasep/errors.hpp"

namespace pushasep {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx expm1c(cplx w) {
  if (std::abs(w) > 1e-3) return std::exp(w) - 1.0;
  cplx term = w, sum = w;
  for (int k = 2; k <= 8; ++k) {
    term *= w / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

cplx log1pc(cplx e) {
  if (std::abs(e) > 1e-3) return std::log(1.0 + e);
  cplx pw = e, sum = 0.0;
  for (int k = 1; k <= 10; ++k) {
    sum += (k % 2 ? 1.0 : -1.0) * pw / static_cast<double>(k);
    pw *= e;
  }
  return sum;
}

// For small |s| the roots split into clusters of size L-N around 0 and N
// around 1, where the companion matrix loses accuracy. Each root is then the
// fixed point of a contraction on its own branch of the logarithm.
bool clustered_roots(cplx s, const RingParams& params, CVector& out) {
  const int L = params.L, N = params.N, M = L - N;
  const double as = std::abs(s);
  if (M > 0 && N > 0) {
    const double c1 = static_cast<double>(M) / N * std::pow(as, 1.0 / N);
    const double c0 = static_cast<double>(N) / M * std::pow(as, 1.0 / M);
    if (std::max(c0, c1) > 0.2) return false;
  }
  const cplx ls = std::log(s);
  const cplx ipi(0.0, std::numbers::pi);
  out.clear();
  for (int k = 0; k < N; ++k) {
    const cplx arg = (ls + cplx(0.0, kTwoPi * k)) / static_cast<double>(N);
    cplx w = 1.0 + std::exp(arg);
    for (int it = 0; it < 100 && M > 0; ++it) {
      const cplx w1 = 1.0 + std::exp(arg - static_cast<double>(M) / N * log1pc(w - 1.0));
      const bool done = std::abs(w1 - w) <= 1e-17 * std::abs(w1 - 1.0);
      w = w1;
      if (done) break;
    }
    out.push_back(w);
  }
  for (int k = 0; k < M; ++k) {
    const cplx arg = (ls + cplx(0.0, kTwoPi * k)) / static_cast<double>(M);
    cplx w = std::exp(arg - static_cast<double>(N) / M * ipi);
    for (int it = 0; it < 100; ++it) {
      // log(w - 1) = i pi + log(1 - w), continuous near w = 0.
      const cplx w1 = std::exp(arg - static_cast<double>(N) / M * (ipi + log1pc(-w)));
      const bool done = std::abs(w1 - w) <= 1e-17 * std::abs(w1);
      w = w1;
      if (done) break;
    }
    out.push_back(w);
  }
  return true;
}

}  // namespace

double critical_radius(const RingParams& params) {
  const double rho = params.rho();
  return std::pow(rho, rho) * std::pow(1.0 - rho, 1.0 - rho);
}

cplx ipow(cplx base, long long n) {
  if (n < 0) return 1.0 / ipow(base, -n);
  cplx r = 1.0;
  while (n) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

cplx q_poly(cplx w, const RingParams& params) {
  return ipow(w, params.L - params.N) * ipow(w - 1.0, params.N);
}

cplx q_poly_derivative(cplx w, const RingParams& params) {
  const int L = params.L, N = params.N;
  // w^{L-N-1} (w-1)^{N-1} (L w - (L-N)), written to stay finite at w = 0 when L = N.
  cplx a = L - N >= 1 ? ipow(w, L - N - 1) : 1.0 / w;
  return a * ipow(w - 1.0, N - 1) * (static_cast<double>(L) * w - static_cast<double>(L - N));
}

cplx lambda_qprime(cplx lambda, const RingParams& params) {
  return (static_cast<double>(params.L) * lambda - static_cast<double>(params.L - params.N)) /
         (lambda - 1.0);
}

CVector q_polynomial_roots(cplx s, const RingParams& params) {
  const int L = params.L, N = params.N;
  if (s == cplx(0.0)) {
    CVector r(L, 0.0);
    std::fill(r.begin() + (L - N), r.end(), cplx(1.0));
    return r;
  }
  if (CVector r; clustered_roots(s, params, r)) return r;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(L + 1);
  for (int k = 0; k <= N; ++k)
    c[L - N + k] = static_cast<double>(binomial(N, k)) * ((N - k) % 2 ? -1.0 : 1.0);
  c[0] -= s;
  Eigen::PolynomialSolver<cplx, Eigen::Dynamic> solver(c);
  const auto& raw = solver.roots();
  CVector r(raw.data(), raw.data() + raw.size());
  for (auto& w : r) {
    for (int it = 0; it < 2; ++it) {
      const cplx f = q_poly(w, params) - s;
      const cplx fp = q_poly_derivative(w, params);
      if (std::abs(fp) == 0.0) break;
      const cplx w1 = w - f / fp;
      if (std::abs(q_poly(w1, params) - s) <= std::abs(f)) w = w1;
    }
  }
  return r;
}

BetheRootSet q_roots(cplx z, const RingParams& params) {
  params.validate();
  const int L = params.L, N = params.N;
  BetheRootSet set;
  set.z = z;
  set.roots = q_polynomial_roots(ipow(z, L), params);
  const double r0 = critical_radius(params);
  const double az = std::abs(z);
  if (std::abs(az - r0) <= 1e-10 * r0)
    throw ConfigError("|z| = r0: q_z has a double root at 1 - rho");
  if (az == 0.0 || az > r0) return set;

  const double cut = 1.0 - params.rho();
  for (int i = 0; i < L; ++i) (set.roots[i].real() < cut ? set.q0 : set.q1).push_back(i);
  if (static_cast<int>(set.q1.size()) != N)
    throw NumericalError("root classification did not produce N roots near 1");
  set.classified = true;

  if (L % N == 0) {
    const int d = L / N;
    set.cycles.assign(N, {});
    const cplx zd = ipow(z, d);
    for (int i = 0; i < L; ++i) {
      const cplx w = set.roots[i];
      const cplx eta = ipow(w, d) * (1.0 - 1.0 / w) / zd;
      long k = std::lround(N * std::arg(eta) / kTwoPi);
      k = ((k % N) + N) % N;
      set.cycles[k].push_back(i);
    }
    for (const auto& c : set.cycles)
      if (static_cast<int>(c.size()) != d) throw NumericalError("cycle grouping is inconsistent");
  }
  return set;
}

cplx BetheRootSet::paired_v(int u) const {
  for (const auto& c : cycles) {
    if (std::find(c.begin(), c.end(), u) == c.end()) continue;
    for (int i : c)
      if (std::find(q1.begin(), q1.end(), i) != q1.end()) return roots[i];
  }
  throw NumericalError("root has no partner in Q1");
}

cplx p_coupling(const CVector& lambdas, cplx z, cplx zeta, const RingParams& params) {
  const int L = params.L;
  cplx prod = 1.0;
  for (const auto& l : lambdas) {
    if (l == cplx(0.0)) throw NumericalError("p_z has a pole at lambda = 0");
    prod *= 1.0 - 1.0 / l;
  }
  const double sign = lambdas.size() % 2 ? -1.0 : 1.0;
  return 1.0 + sign * ipow(zeta, L) * ipow(z, -L) * prod;
}

cplx bethe_u(const CVector& lambdas, const std::vector<int>& x) {
  const int n = static_cast<int>(lambdas.size());
  Eigen::MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j) {
    const cplx a = 1.0 - 1.0 / lambdas[j];
    for (int i = 0; i < n; ++i) m(i, j) = ipow(a, j - i) * ipow(lambdas[j], -x[i]);
  }
  return m.determinant();
}

cplx bethe_h(const CVector& lambdas, const std::vector<int>& y) {
  cplx h = 1.0;
  for (std::size_t j = 0; j < lambdas.size(); ++j) h *= ipow(lambdas[j], y[j]);
  return h;
}

cplx amplitude_sum(const CVector& lambdas, const std::vector<int>& y, const std::vector<int>& x) {
  const int n = static_cast<int>(lambdas.size());
  std::vector<int> sigma(n);
  for (int i = 0; i < n; ++i) sigma[i] = i;
  cplx total = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inversions += sigma[i] > sigma[j];
    cplx term = inversions % 2 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) {
      const cplx l = lambdas[sigma[i]];
      term *= ipow(1.0 - 1.0 / l, sigma[i] - i) * ipow(l, y[sigma[i]] - x[i]);
    }
    total += term;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return total;
}

cplx bethe_function(const CVector& ws, const Configuration& x, cplx zeta) {
  const int n = static_cast<int>(ws.size());
  Eigen::MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j) {
    const cplx a = 1.0 - 1.0 / (zeta * ws[j]);
    for (int i = 0; i < n; ++i) m(i, j) = ipow(a, j - i) * ipow(ws[j], -x[i]);
  }
  const cplx v = m.determinant();
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw NumericalError("Bethe function has a singular entry");
  return v;
}

cplx energy(const CVector& ws, cplx zeta, const RingParams& params) {
  cplx e = 0.0;
  for (const auto& w : ws) e += params.p * zeta * w + params.q() / (zeta * w) - 1.0;
  return e;
}

cplx energy_lambda(const CVector& lambdas, const RingParams& params) {
  cplx e = 0.0;
  for (const auto& l : lambdas) e += params.p * l + params.q() / l - 1.0;
  return e;
}

CVector BetheTuple::ws() const {
  CVector w(lambdas);
  for (auto& v : w) v /= zeta;
  return w;
}

// ---------------------------------------------------------------------------
// Coupled roots

namespace {

struct CoupledSearch {
  const RingParams& params;
  cplx c;  // (-1)^N zeta^L

  cplx log_product(cplx s) const {
    const int L = params.L, N = params.N;
    const CVector r = q_polynomial_roots(s, params);
    CVector mu(L);
    for (int i = 0; i < L; ++i) mu[i] = 1.0 - 1.0 / r[i];
    cplx acc = 0.0;
    for_each_subset(L, N, [&](const std::vector<int>& idx) {
      cplx prod = 1.0;
      for (int i : idx) prod *= mu[i];
      acc += std::log(1.0 + c / s * prod);
    });
    return acc;
  }

  static cplx point(double u, double th) { return std::exp(cplx(u, th)); }

  static double wrap(double a) { return std::remainder(a, kTwoPi); }

  double segment(double u0, double t0, double l0, double u1, double t1, double l1,
                 int depth) const {
    const double dphi = wrap(l1 - l0);
    if (std::abs(dphi) < 0.6) return dphi;
    if (depth > 40) throw NumericalError("zero of P on a cell edge");
    const double um = 0.5 * (u0 + u1), tm = 0.5 * (t0 + t1);
    const double lm = log_product(point(um, tm)).imag();
    return segment(u0, t0, l0, um, tm, lm, depth + 1) + segment(um, tm, lm, u1, t1, l1, depth + 1);
  }

  double edge(double u0, double t0, double u1, double t1) const {
    constexpr int base = 8;
    double total = 0.0;
    double pu = u0, pt = t0, pl = log_product(point(u0, t0)).imag();
    for (int k = 1; k <= base; ++k) {
      const double u = u0 + (u1 - u0) * k / base, t = t0 + (t1 - t0) * k / base;
      const double l = log_product(point(u, t)).imag();
      total += segment(pu, pt, pl, u, t, l, 0);
      pu = u;
      pt = t;
      pl = l;
    }
    return total;
  }

  int winding(double u0, double u1, double t0, double t1) const {
    const double total = edge(u0, t0, u1, t0) + edge(u1, t0, u1, t1) + edge(u1, t1, u0, t1) +
                         edge(u0, t1, u0, t0);
    return static_cast<int>(std::lround(total / kTwoPi));
  }

  // Newton on p_S(s) with the subset tracked by nearest-root continuation.
  bool newton(cplx& s, CVector& lam) const {
    for (int it = 0; it < 80; ++it) {
      cplx prod = 1.0, dlog = 0.0;
      for (const auto& l : lam) {
        const cplx mu = 1.0 - 1.0 / l;
        prod *= mu;
        const cplx dl = 1.0 / q_poly_derivative(l, params);
        dlog += dl / (l * l) / mu;
      }
      const cplx p = 1.0 + c / s * prod;
      const cplx dp = c * prod * (-1.0 / (s * s) + dlog / s);
      cplx step = p / dp;
      if (!std::isfinite(std::abs(step))) return false;
      if (std::abs(step) > 0.5 * std::abs(s)) step *= 0.5 * std::abs(s) / std::abs(step);
      s -= step;
      const CVector r = q_polynomial_roots(s, params);
      for (auto& l : lam) {
        auto best = std::min_element(r.begin(), r.end(), [&](cplx a, cplx b) {
          return std::abs(a - l) < std::abs(b - l);
        });
        l = *best;
      }
      if (std::abs(step) < 1e-15 * std::abs(s)) return true;
    }
    return false;
  }
};

struct Cell {
  double u0, u1, t0, t1;
  int wind;
};

bool same_tuple(const CVector& a, const CVector& b) {
  for (const auto& x : a) {
    bool hit = false;
    for (const auto& y : b) hit = hit || std::abs(x - y) < 1e-7 * (1.0 + std::abs(x));
    if (!hit) return false;
  }
  return true;
}

}  // namespace

std::vector<BetheTuple> coupled_roots(cplx zeta, const RingParams& params,
                                      const CoupledRootOptions& opt) {
  params.validate();
  if (std::abs(std::abs(zeta) - 1.0) > 1e-12) throw ConfigError("zeta must lie on the unit circle");
  const int L = params.L, N = params.N;
  const double r_max = opt.r_max > 0 ? opt.r_max : 1.0 + params.rho() + 0.05;
  if (!(opt.r_min > 0 && opt.r_min < r_max)) throw ConfigError("invalid annulus for coupled roots");
  CoupledSearch search{params, (N % 2 ? -1.0 : 1.0) * ipow(zeta, L)};

  const double ulo = L * std::log(opt.r_min), uhi = L * std::log(r_max);
  const int nr = opt.radial_cells, na = opt.angular_cells;

  std::vector<Cell> leaves;
  int expected = 0;
  // Retry with a rotated grid when a zero sits on a cell edge.
  for (int attempt = 0;; ++attempt) {
    try {
      const double offset = 0.1234 + 0.37 * attempt;
      std::vector<Cell> cells;
      for (int i = 0; i < nr; ++i)
        for (int j = 0; j < na; ++j)
          cells.push_back({ulo + (uhi - ulo) * i / nr, ulo + (uhi - ulo) * (i + 1) / nr,
                           offset + kTwoPi * j / na, offset + kTwoPi * (j + 1) / na, 0});
      tbb::parallel_for(std::size_t(0), cells.size(), [&](std::size_t k) {
        auto& c = cells[k];
        c.wind = search.winding(c.u0, c.u1, c.t0, c.t1);
      });
      expected = 0;
      std::vector<Cell> active;
      for (const auto& c : cells)
        if (c.wind > 0) {
          expected += c.wind;
          active.push_back(c);
        }
      leaves.clear();
      while (!active.empty()) {
        std::vector<Cell> next;
        for (const auto& c : active) {
          if (std::max(c.u1 - c.u0, c.t1 - c.t0) < opt.min_diameter) {
            leaves.push_back(c);
            continue;
          }
          const double um = 0.5 * (c.u0 + c.u1), tm = 0.5 * (c.t0 + c.t1);
          std::vector<Cell> kids{{c.u0, um, c.t0, tm, 0},
                                 {um, c.u1, c.t0, tm, 0},
                                 {c.u0, um, tm, c.t1, 0},
                                 {um, c.u1, tm, c.t1, 0}};
          for (auto& k : kids) {
            k.wind = search.winding(k.u0, k.u1, k.t0, k.t1);
            if (k.wind > 0) next.push_back(k);
          }
        }
        active.swap(next);
      }
      break;
    } catch (const NumericalError&) {
      if (attempt >= 4) throw;
    }
  }

  std::vector<BetheTuple> out;
  std::vector<cplx> zeros;
  int found = 0;
  for (const auto& c : leaves) {
    const cplx center = CoupledSearch::point(0.5 * (c.u0 + c.u1), 0.5 * (c.t0 + c.t1));
    const CVector r0 = q_polynomial_roots(center, params);
    for_each_subset(L, N, [&](const std::vector<int>& idx) {
      cplx s = center;
      CVector lam;
      for (int i : idx) lam.push_back(r0[i]);
      if (!search.newton(s, lam)) return;
      const double du = std::log(std::abs(s)) - 0.5 * (c.u0 + c.u1);
      const double dt = std::remainder(std::arg(s) - 0.5 * (c.t0 + c.t1), kTwoPi);
      const double slack = 2.0 * std::max(c.u1 - c.u0, c.t1 - c.t0);
      if (std::abs(du) > slack || std::abs(dt) > slack) return;
      bool seen = false;
      for (const auto& zz : zeros) seen = seen || std::abs(zz - s) < 1e-9 * std::abs(s);
      if (seen) return;
      zeros.push_back(s);
      // Every subset vanishing at this s is a separate tuple.
      const CVector r = q_polynomial_roots(s, params);
      const cplx z = std::pow(s, 1.0 / L);
      for_each_subset(L, N, [&](const std::vector<int>& jdx) {
        CVector l2;
        cplx prod = 1.0;
        for (int j : jdx) {
          l2.push_back(r[j]);
          prod *= 1.0 - 1.0 / r[j];
        }
        const cplx p = 1.0 + search.c / s * prod;
        if (std::abs(p) >= opt.tol * (1.0 + std::abs(prod / s))) return;
        for (std::size_t a = 0; a < l2.size(); ++a)
          for (std::size_t b = a + 1; b < l2.size(); ++b)
            if (std::abs(l2[a] - l2[b]) < 1e-8) return;
        for (const auto& t : out)
          if (std::abs(t.z - z) < 1e-9 && same_tuple(t.lambdas, l2)) return;
        out.push_back({l2, z, zeta, energy_lambda(l2, params)});
        ++found;
      });
    });
  }
  if (found < expected)
    throw NumericalError("coupled root search left " + std::to_string(expected - found) +
                         " zeros unresolved");
  return out;
}

// ---------------------------------------------------------------------------
// Series toolkit

Rational fuss_catalan(Rational p, Rational r, int m) {
  if (m < 0) throw ConfigError("Fuss-Catalan index must be nonnegative");
  if (m == 0) return Rational(1);
  Rational acc = r;
  for (int i = 1; i <= m - 1; ++i) acc *= Rational(m) * p + r - Rational(i);
  for (int i = 2; i <= m; ++i) acc /= Rational(i);
  return acc;
}

double fuss_catalan(double p, double r, int m) {
  if (m < 0) throw ConfigError("Fuss-Catalan index must be nonnegative");
  double acc = 1.0;
  if (m == 0) return acc;
  acc = r;
  for (int i = 1; i <= m - 1; ++i) acc *= m * p + r - i;
  for (int i = 2; i <= m; ++i) acc /= i;
  return acc;
}

cplx phi_expansion(cplx z, cplx eta, int M, const RingParams& params) {
  params.validate();
  const double rho = params.rho();
  const double d = 1.0 / rho;
  const cplx zd = params.L % params.N == 0 ? ipow(z, params.L / params.N) : std::pow(z, d);
  const cplx Z = -eta * zd;
  const double radius = rho * std::pow(1.0 - rho, d - 1.0);
  if (std::abs(Z) >= radius) throw ConfigError("phi series evaluated outside its disk of convergence");
  cplx sum = 0.0, pw = 1.0;
  for (int m = 0; m <= M; ++m) {
    sum += fuss_catalan(d, d, m) * pw;
    pw *= Z;
  }
  return -Z * sum;
}

cplx log_psi(cplx z, const RingParams& params) {
  params.validate();
  const int L = params.L, N = params.N;
  const double r0 = critical_radius(params);
  if (std::abs(z) >= r0) throw ConfigError("Psi is only defined for |z| < r0");
  if (z == cplx(0.0)) return 0.0;
  const double lz = std::log(std::abs(z)), az = std::arg(z);
  cplx sum = 0.0;
  for (long k = 1; k < 200000; ++k) {
    const double kl = static_cast<double>(k) * L, kn = static_cast<double>(k) * N;
    const double lc = std::lgamma(kl + 1) - std::lgamma(kn + 1) - std::lgamma(kl - kn + 1);
    const double mag = std::exp(lc + kl * lz) / k;
    const double sign = (k * N) % 2 ? -1.0 : 1.0;
    const cplx term = sign * mag * std::polar(1.0, std::fmod(kl * az, kTwoPi));
    sum += term;
    if (mag < 1e-18 * std::max(1.0, std::abs(sum))) return sum;
  }
  throw NumericalError("log Psi series did not converge");
}

cplx psi_product(cplx z, const RingParams& params) { return std::exp(log_psi(z, params)); }

cplx limit_ratio(cplx z, const RingParams& params) {
  const auto set = q_roots(z, params);
  if (!set.classified) throw ConfigError("limit ratio needs 0 < |z| < r0");
  const int N = params.N;
  const cplx lam_n = set.roots[set.q1.back()];
  const cplx lp = log_psi(z, params);
  const cplx psi = std::exp(lp);
  const cplx omega = (1.0 - 1.0 / lam_n) / psi;  // 1 - 1/mu
  cplx num = omega / (1.0 - omega);                // mu - 1
  for (int i = 0; i + 1 < N; ++i) num *= set.roots[set.q1[i]] - 1.0;
  // q_z(mu) = 1 - (lambda_N / mu)^L Psi^N, with lambda_N / mu = 1 + eps.
  const cplx eps = (lam_n - 1.0) * -expm1c(-lp);
  const cplx qz = -expm1c(static_cast<double>(params.L) * log1pc(eps) + static_cast<double>(N) * lp);
  return num / qz;
}

}  // namespace pushasep
