#include "pushasep/limits.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <boost/math/tools/roots.hpp>
#include <tbb/parallel_for.h>

#include "pushasep/errors.hpp"

namespace pushasep {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSeriesRadius = 0.6;
constexpr int kBoseTerms = 120;

bool on_cut(cplx z) { return z.imag() == 0.0 && z.real() >= 1.0; }

// zeta(s - k) / k! for the Bose expansion.
const std::vector<double>& bose_coefficients(double s) {
  static std::mutex mu;
  static std::vector<std::pair<double, std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  for (const auto& [key, c] : cache)
    if (key == s) return c;
  std::vector<double> c(kBoseTerms);
  double fact = 1.0;
  for (int k = 0; k < kBoseTerms; ++k) {
    if (k > 0) fact *= k;
    c[k] = boost::math::zeta(s - k) / fact;
  }
  cache.emplace_back(s, std::move(c));
  return cache.back().second;
}

cplx direct_series(double s, cplx z, double tol) {
  cplx acc = 0.0, zk = 1.0;
  for (int k = 1; k < 100000; ++k) {
    zk *= z;
    const cplx term = zk / std::pow(static_cast<double>(k), s);
    acc += term;
    if (std::abs(zk) < tol * std::max(1.0, std::abs(acc))) break;
  }
  return acc;
}

// Li_s(e^mu) with |Im mu| <= pi.
cplx bose(double s, cplx mu, double tol) {
  if (std::abs(mu) >= 2 * kPi - 0.5) throw ConfigError("polylog argument outside supported domain");
  const auto& c = bose_coefficients(s);
  cplx acc = std::tgamma(1.0 - s) * std::exp((s - 1.0) * std::log(-mu));
  cplx mk = 1.0;
  for (int k = 0; k < kBoseTerms; ++k) {
    const cplx term = c[k] * mk;
    acc += term;
    if (k > 2 && std::abs(term) < tol * std::max(1.0, std::abs(acc))) break;
    mk *= mu;
  }
  return acc;
}

double reduce_angle(double a) {
  a = std::fmod(a + kPi, 2 * kPi);
  if (a <= 0) a += 2 * kPi;
  return a - kPi;
}

// Gauss-Legendre rule for the vertical part of the psi path.
using Gauss = boost::math::quadrature::gauss<double, 20>;

cplx gauss_panel(double lo, double hi, double a) {
  const auto& x = Gauss::abscissa();
  const auto& w = Gauss::weights();
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  cplx acc = 0.0;
  auto f = [&](double y) {
    const cplx om(a, y);
    return polylog_exp(0.5, -0.5 * om * om);
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w[i];
    if (x[i] == 0.0) {
      acc += wi * f(mid);
    } else {
      acc += wi * (f(mid + half * x[i]) + f(mid - half * x[i]));
    }
  }
  return acc * half;
}

double limit_const(LimitKind kind) {
  const double c = 1.0 / std::sqrt(2 * kPi);
  return kind == LimitKind::Flat ? c : 2 * c;
}

cplx tree_sum(std::vector<cplx> v) {
  while (v.size() > 1) {
    std::vector<cplx> next;
    for (std::size_t i = 0; i + 1 < v.size(); i += 2) next.push_back(v[i] + v[i + 1]);
    if (v.size() % 2) next.push_back(v.back());
    v.swap(next);
  }
  return v.empty() ? cplx(0.0) : v.front();
}

LimitValue finish(const std::vector<cplx>& vals, const std::vector<double>& tails) {
  const cplx mean = tree_sum(vals) / static_cast<double>(vals.size());
  LimitValue out;
  out.value = mean.real();
  out.imag_residue = mean.imag();
  out.tail_estimate = *std::max_element(tails.begin(), tails.end());
  if (std::abs(out.imag_residue) > 1e-6)
    throw NumericalError("limit distribution: imaginary residue above 1e-6");
  return out;
}

}  // namespace

cplx polylog(double s, cplx z, double tol) {
  if (on_cut(z) && z != cplx(1.0)) throw ConfigError("polylog: argument on the branch cut [1, inf)");
  if (z == cplx(1.0)) throw ConfigError("polylog: argument at the branch point 1");
  if (z == cplx(0.0)) return 0.0;
  if (std::abs(z) <= kSeriesRadius) return direct_series(s, z, tol);
  return bose(s, std::log(z), tol);
}

cplx polylog_exp(double s, cplx mu, double tol) {
  if (mu.real() <= std::log(kSeriesRadius)) return direct_series(s, std::exp(mu), tol);
  const cplx red(mu.real(), reduce_angle(mu.imag()));
  if (red.imag() == 0.0 && red.real() >= 0.0)
    throw ConfigError("polylog: argument on the branch cut [1, inf)");
  return bose(s, red, tol);
}

AuxValues aux_functions(cplx z) {
  if (on_cut(z)) throw ConfigError("aux_functions: argument on the branch cut [1, inf)");
  const double az = std::abs(z);
  if (az >= 1.0) throw ConfigError("aux_functions: |z| must be below 1");
  AuxValues a;
  const double c = 1.0 / std::sqrt(2 * kPi);
  a.A1 = -polylog(1.5, z) * c;
  a.A2 = -polylog(2.5, z) * c;
  a.A3 = -0.25 * std::log(1.0 - z);
  // B = (1/4pi) sum_k z^k/k sum_{n=1}^{k-1} (n (k-n))^{-1/2}.
  cplx b = 0.0, zk = z;
  if (az > 0.0) {
    const int kmax = static_cast<int>(std::ceil(std::log(1e-19) / std::log(az))) + 2;
    for (int k = 2; k <= kmax; ++k) {
      zk *= z;
      double inner = 0.0;
      for (int n = 1; n < k; ++n) inner += 1.0 / std::sqrt(static_cast<double>(n) * (k - n));
      b += zk * (inner / k);
    }
  }
  a.B = b / (4 * kPi);
  return a;
}

SMinusSet s_minus(cplx z, int K) {
  if (!(std::abs(z) > 0.0 && std::abs(z) < 1.0)) throw ConfigError("s_minus: need 0 < |z| < 1");
  if (K < 0) throw ConfigError("s_minus: K must be nonnegative");
  SMinusSet set;
  set.z = z;
  set.K = K;
  const cplx lz = std::log(z);
  for (int k = -K; k <= K; ++k) {
    cplx xi = -std::sqrt(-2.0 * lz + cplx(0.0, 4 * kPi * k));
    for (int it = 0; it < 2; ++it) {
      const cplx e = std::exp(-0.5 * xi * xi);
      xi -= (e - z) / (-xi * e);
    }
    set.xi.push_back(xi);
  }
  return set;
}

cplx psi_integral(cplx xi) {
  const double a = xi.real(), b = xi.imag();
  if (!(a < -std::abs(b))) throw ConfigError("psi_integral: xi outside the sector (3pi/4, 5pi/4)");
  // Horizontal part: sum_n n^{-1/2} int_{-inf}^a e^{-n w^2/2} dw.
  double horiz = 0.0;
  for (int n = 1; n < 1000000; ++n) {
    const double term = std::sqrt(kPi / 2) * std::erfc(-a * std::sqrt(n / 2.0)) / n;
    horiz += term;
    if (term < 1e-18) break;
  }
  // Vertical part: i int_0^b Li_{1/2}(e^{-(a+iy)^2/2}) dy. The integrand is
  // singular where e^{-w^2/2} = 1, at distance about dist/|xi| from the
  // endpoint, so panels grow geometrically away from y = b.
  const cplx mu_end = -0.5 * xi * xi;
  const double dist = std::abs(cplx(mu_end.real(), reduce_angle(mu_end.imag())));
  const double h0 = std::min(0.25, 0.5 * dist / std::abs(xi));
  std::vector<double> cuts{0.0};
  for (double h = h0, d = h0; d < std::abs(b); h = std::min(0.25, 2 * h), d += h) cuts.push_back(d);
  cuts.push_back(std::abs(b));
  const double sgn = b < 0 ? -1.0 : 1.0;
  cplx vert = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    vert += gauss_panel(sgn * (std::abs(b) - cuts[i + 1]), sgn * (std::abs(b) - cuts[i]), a);
  return horiz + cplx(0.0, 1.0) * vert;
}

cplx psi_exponent(cplx xi, double x, double tau, LimitKind kind) {
  return -tau * xi * xi * xi / 3.0 + x * xi - limit_const(kind) * psi_integral(xi);
}

void LimitParams::validate() const {
  if (K < 8) throw ConfigError("K must be at least 8");
  if (Mz < 16 || Mz % 2) throw ConfigError("Mz must be even and at least 16");
  if (!(rz > 0.0 && rz < 1.0)) throw ConfigError("rz must lie in (0, 1)");
}

LimitTables::LimitTables(const LimitParams& lp) : lp_(lp) {
  lp_.validate();
  nodes_.resize(lp_.Mz);
  tbb::parallel_for(0, lp_.Mz, [&](int m) {
    Node& nd = nodes_[m];
    nd.z = std::polar(lp_.rz, 2 * kPi * (m + 0.5) / lp_.Mz);
    nd.aux = aux_functions(nd.z);
    nd.xi = s_minus(nd.z, lp_.K).xi;
    nd.integral.resize(nd.xi.size());
    for (std::size_t i = 0; i < nd.xi.size(); ++i) nd.integral[i] = psi_integral(nd.xi[i]);
  });
}

LimitValue LimitTables::f1(double x, double tau) const {
  if (!(tau > 0)) throw ConfigError("tau must be positive");
  const int M = lp_.Mz, n = 2 * lp_.K + 1;
  std::vector<cplx> vals(M);
  std::vector<double> tails(M, 0.0);
  const double c = limit_const(LimitKind::Flat);
  tbb::parallel_for(0, M, [&](int m) {
    const Node& nd = nodes_[m];
    std::vector<cplx> e(n);
    for (int i = 0; i < n; ++i) {
      const cplx xi = nd.xi[i];
      e[i] = std::exp(-tau * xi * xi * xi / 3.0 + x * xi - c * nd.integral[i]);
    }
    Eigen::MatrixXcd k(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) k(i, j) = e[i] * e[j] / (nd.xi[i] * (nd.xi[i] + nd.xi[j]));
    double tail = 0.0;
    for (int i = 0; i < n; ++i)
      tail = std::max({tail, std::abs(k(0, i)), std::abs(k(n - 1, i)), std::abs(k(i, 0)),
                       std::abs(k(i, n - 1))});
    tails[m] = tail;
    const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n) - k;
    const AuxValues& ax = nd.aux;
    vals[m] = std::exp(x * ax.A1 + tau * ax.A2 + ax.A3 + ax.B) * a.partialPivLu().determinant();
  });
  return finish(vals, tails);
}

LimitValue LimitTables::f2(double x, double tau, double gamma) const {
  if (!(tau > 0)) throw ConfigError("tau must be positive");
  const int M = lp_.Mz, n = 2 * lp_.K + 1;
  std::vector<cplx> vals(M);
  std::vector<double> tails(M, 0.0);
  const double c = limit_const(LimitKind::Step);
  tbb::parallel_for(0, M, [&](int m) {
    const Node& nd = nodes_[m];
    std::vector<cplx> left(n), right(n);
    for (int i = 0; i < n; ++i) {
      const cplx xi = nd.xi[i];
      const cplx phi = -tau * xi * xi * xi / 3.0 + x * xi - c * nd.integral[i];
      left[i] = std::exp(phi + 0.5 * gamma * xi * xi) / xi;
      right[i] = std::exp(phi - 0.5 * gamma * xi * xi) / xi;
    }
    // K = A B with A(xi1, eta) = left(xi1) right(eta)/(xi1 + eta), B(eta, xi2) = 1/(xi2 + eta).
    Eigen::MatrixXcd a(n, n), b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        a(i, j) = left[i] * right[j] / (nd.xi[i] + nd.xi[j]);
        b(i, j) = 1.0 / (nd.xi[i] + nd.xi[j]);
      }
    const Eigen::MatrixXcd k = a * b;
    double tail = 0.0;
    for (int i = 0; i < n; ++i)
      tail = std::max({tail, std::abs(k(0, i)), std::abs(k(n - 1, i)), std::abs(k(i, 0)),
                       std::abs(k(i, n - 1))});
    tails[m] = tail;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n) - k;
    const AuxValues& ax = nd.aux;
    vals[m] = std::exp(x * ax.A1 + tau * ax.A2 + 2.0 * ax.B) * id.partialPivLu().determinant();
  });
  return finish(vals, tails);
}

LimitValue f1(double x, double tau, const LimitParams& lp) { return LimitTables(lp).f1(x, tau); }

LimitValue f2(double x, double tau, double gamma, const LimitParams& lp) {
  return LimitTables(lp).f2(x, tau, gamma);
}

ScalingConstants scaling_constants(double rho, double p) {
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("density must lie in (0, 1)");
  const double q = 1.0 - p;
  ScalingConstants s;
  s.v = rho * (p * (1 - rho) - q / (1 - rho));
  s.r = p + q / std::pow(1 - rho, 3);
  s.vshock = p * (1 - 2 * rho) - q / ((1 - rho) * (1 - rho));
  return s;
}

ScalingConstants scaling_constants(const RingParams& params) {
  params.validate();
  return scaling_constants(params.rho(), params.p);
}

double critical_density(double p) {
  const double q = 1.0 - p;
  if (!(p > q)) throw ConfigError("vshock has no zero in (0, 1) unless p > q");
  auto f = [&](double rho) { return scaling_constants(rho, p).vshock; };
  // vshock decreases from p - q > 0 at rho = 0 to -inf at rho = 1.
  double hi = 1.0 - 1e-12;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, 1e-12, hi, boost::math::tools::eps_tolerance<double>(52),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

ScalingPoint scaling_map(ScalingKind kind, const RingParams& params, double tau, double x,
                         double gamma, int shift) {
  params.validate();
  if (!(tau > 0)) throw ConfigError("tau must be positive");
  const int L = params.L, N = params.N;
  const double rho = params.rho();
  const auto sc = scaling_constants(params);
  const double relax = tau / std::sqrt(rho * (1 - rho));
  auto shock_time = [&](double offset) {
    if (sc.vshock == 0.0) throw ConfigError("case (b) needs a nonzero shock speed");
    const double av = std::abs(sc.vshock);
    return L / av * std::floor(av * relax * std::sqrt(static_cast<double>(L))) - offset / sc.vshock;
  };
  ScalingPoint pt;
  double offset = 0.0;
  switch (kind) {
    case ScalingKind::Flat:
      pt.t = relax * std::pow(L, 1.5);
      break;
    case ScalingKind::Step1a:
      if (gamma < 0 || gamma > 1 - rho) throw ConfigError("step1a needs gamma in [0, 1-rho]");
      pt.shift = static_cast<int>(std::floor((1 - rho - gamma) * L));
      pt.t = relax * std::pow(L, 1.5);
      break;
    case ScalingKind::Step1b:
      pt.shift = shift;
      pt.t = shock_time((rho + gamma) * L + shift);
      break;
    case ScalingKind::Step2a:
      if (gamma < 1 - rho || gamma > 1) throw ConfigError("step2a needs gamma in [1-rho, 1]");
      pt.shift = static_cast<int>(std::floor((1 - gamma) * L));
      pt.t = relax * std::pow(L, 1.5);
      break;
    case ScalingKind::Step2b:
      pt.shift = shift;
      pt.t = shock_time(shift + gamma * L);
      break;
  }
  if (kind == ScalingKind::Step1a || kind == ScalingKind::Step1b) {
    if (pt.shift < 0 || pt.shift > L - N) throw ConfigError("step1 shift m must satisfy 0 <= m <= L-N");
    offset = rho * ((1 - rho) * L - pt.shift);
  }
  if (kind == ScalingKind::Step2a || kind == ScalingKind::Step2b) {
    if (pt.shift < 0 || pt.shift > N) throw ConfigError("step2 shift k must satisfy 0 <= k <= N");
    offset = (1 - rho) * pt.shift;
  }
  if (!(pt.t >= 0)) throw ConfigError("scaling map produced a negative time");
  pt.centering = sc.v * pt.t - offset;
  pt.scale = std::pow(rho * (1 - rho), 2.0 / 3.0) * std::cbrt(pt.t);
  pt.Q = static_cast<long long>(std::ceil(pt.centering - x * pt.scale - 1e-12));
  pt.limit_x = std::cbrt(tau) * x;
  pt.limit_tau = sc.r * tau;
  return pt;
}

}  // namespace pushasep
