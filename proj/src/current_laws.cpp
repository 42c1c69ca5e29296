#include "pushasep/current_laws.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/complex128.hpp>
#include <tbb/parallel_for.h>

#include "pushasep/errors.hpp"

namespace pushasep {

namespace {

constexpr double kImagTol = 1e-9;
constexpr double kPi = 3.14159265358979323846;

double sign_pow(long long e) { return (e % 2 == 0) ? 1.0 : -1.0; }

double real_checked(cplx v, const char* what) {
  if (std::abs(v.imag()) > kImagTol)
    throw NumericalError(std::string(what) + ": imaginary residue " +
                         std::to_string(v.imag()) + " above tolerance");
  return v.real();
}

cplx det_of(const Eigen::MatrixXcd& a) {
  if (a.rows() == 0) return 1.0;
  return a.partialPivLu().determinant();
}

cplx energy_of(cplx lam, double t, const RingParams& params) {
  return std::exp(t * (params.p * lam + params.q() / lam - 1.0));
}

void check_increasing(const std::vector<int>& v, int N, const char* what) {
  if (static_cast<int>(v.size()) != N)
    throw ConfigError(std::string(what) + " must have N entries");
  for (int i = 1; i < N; ++i)
    if (v[i] <= v[i - 1]) throw ConfigError(std::string(what) + " must be strictly increasing");
}

void check_radius(double r, const RingParams& params) {
  const double r0 = critical_radius(params);
  if (!(r > 0.0 && r < r0)) throw ConfigError("contour radius must lie in (0, r0)");
}

// The Fredholm integrands are large and cancel to values far below their
// size, so they are evaluated in quad precision throughout.
using Quad = boost::multiprecision::complex128;
using QuadReal = boost::multiprecision::float128;

Quad to_quad(cplx v) { return Quad(v.real(), v.imag()); }

Quad qpow(Quad b, long long n) {
  if (n < 0) {
    b = Quad(1) / b;
    n = -n;
  }
  Quad r(1);
  while (n) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

Quad qenergy(const Quad& w, double t, const RingParams& params) {
  return exp(Quad(t) * (Quad(params.p) * w + Quad(params.q()) / w - Quad(1)));
}

// Newton polish of a root of w^{L-N} (w-1)^N - s.
Quad polish(Quad w, const Quad& s, const RingParams& params) {
  const int L = params.L, N = params.N;
  for (int it = 0; it < 40; ++it) {
    const Quad a = qpow(w, L - N - 1), b = qpow(w - Quad(1), N - 1);
    const Quad f = a * w * b * (w - Quad(1)) - s;
    const Quad fp = a * b * (Quad(L) * w - Quad(L - N));
    const Quad step = f / fp;
    w -= step;
    if (abs(step) <= QuadReal(1e-33) * abs(w)) break;
  }
  return w;
}

Quad quad_det(std::vector<std::vector<Quad>> m) {
  const int n = static_cast<int>(m.size());
  Quad det(1);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (abs(m[i][k]) > abs(m[piv][k])) piv = i;
    if (piv != k) {
      std::swap(m[piv], m[k]);
      det = -det;
    }
    det *= m[k][k];
    if (m[k][k] == Quad(0)) return Quad(0);
    for (int i = k + 1; i < n; ++i) {
      const Quad l = m[i][k] / m[k][k];
      for (int j = k + 1; j < n; ++j) m[i][j] -= l * m[k][j];
    }
  }
  return det;
}

Quad prod_minus(const Quad& w, const std::vector<Quad>& roots, int skip = -1) {
  Quad acc(1);
  for (int i = 0; i < static_cast<int>(roots.size()); ++i)
    if (i != skip) acc *= w - roots[i];
  return acc;
}

// Q0 and Q1 roots at one node, sorted by argument then modulus, with the
// Q1 partner index of every Q0 root.
struct FredholmNode {
  std::vector<Quad> U, V;
  std::vector<int> partner;
};

FredholmNode fredholm_node(const Quad& z, const RingParams& params, bool pair) {
  const cplx zd(static_cast<double>(real(z)), static_cast<double>(imag(z)));
  const auto set = q_roots(zd, params);
  auto order = [&](std::vector<int> idx) {
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      const cplx ra = set.roots[a], rb = set.roots[b];
      if (std::arg(ra) != std::arg(rb)) return std::arg(ra) < std::arg(rb);
      return std::abs(ra) < std::abs(rb);
    });
    return idx;
  };
  const auto iu = order(set.q0), iv = order(set.q1);
  const Quad s = qpow(z, params.L);
  FredholmNode nd;
  for (int i : iu) nd.U.push_back(polish(to_quad(set.roots[i]), s, params));
  for (int i : iv) nd.V.push_back(polish(to_quad(set.roots[i]), s, params));
  if (pair)
    for (int i : iu) {
      const cplx v = set.paired_v(i);
      int k = 0;
      while (set.roots[iv[k]] != v) ++k;
      nd.partner.push_back(k);
    }
  return nd;
}

Quad flat_integrand(const FredholmNode& nd, int d, int delta, long long Q, double t,
                    const RingParams& params) {
  const int N = params.N;
  const Quad shift(1.0 - params.rho());
  const int n = static_cast<int>(nd.U.size());
  auto f = [&](const Quad& w, int skip) {
    return qpow(w, -N + 2 + delta) * qpow(Quad(1) - Quad(1) / w, Q - N + 1) * qenergy(w, t, params) /
           (w - shift) * prod_minus(w, nd.V, skip);
  };
  std::vector<Quad> fu(n), fv(nd.V.size());
  for (int a = 0; a < n; ++a) fu[a] = f(nd.U[a], -1);
  for (std::size_t b = 0; b < nd.V.size(); ++b) fv[b] = f(nd.V[b], static_cast<int>(b));
  std::vector<std::vector<Quad>> m(n, std::vector<Quad>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const int k = nd.partner[b];
      m[a][b] = fu[a] / ((nd.U[a] - nd.V[k]) * fv[k]) + Quad(a == b ? 1 : 0);
    }

  Quad logc(0);
  for (const auto& u : nd.U) logc -= Quad(static_cast<double>(Q)) * log(Quad(1) - u);
  const Quad vexp(params.L - N - static_cast<double>(Q) - d / 2.0 + 1 + delta);
  for (const auto& v : nd.V) {
    logc += vexp * log(v) + Quad(t) * (Quad(params.p) * v + Quad(params.q()) / v - Quad(1));
    for (const auto& u : nd.U) logc -= Quad(0.5) * log(v - u);
  }
  Quad c = exp(logc);
  for (const auto& v : nd.V) c *= sqrt(Quad(1) / (Quad(d) * (v - shift)));
  return c * quad_det(std::move(m));
}

Quad step_integrand(const FredholmNode& nd, int which, int shift, long long Q, double t,
                    const RingParams& params) {
  const int L = params.L, N = params.N;
  const Quad ctr(1.0 - params.rho());
  const int n = static_cast<int>(nd.U.size());
  const auto& U = nd.U;
  const auto& V = nd.V;
  auto f = [&](const Quad& w, int skip) {
    Quad base = which == 1 ? qpow(w, shift - N + 2) * qpow(Quad(1) - Quad(1) / w, Q - N + 1)
                           : qpow(w, -2 * N + shift + 2) * qpow(Quad(1) - Quad(1) / w, Q - 2 * N + shift + 1);
    const Quad g = prod_minus(w, V, skip);
    return base * qenergy(w, t, params) / (w - ctr) * g * g;
  };
  std::vector<Quad> fu(n), fv(V.size());
  for (int a = 0; a < n; ++a) fu[a] = f(U[a], -1);
  for (std::size_t b = 0; b < V.size(); ++b) fv[b] = f(V[b], static_cast<int>(b));
  std::vector<std::vector<Quad>> m(n, std::vector<Quad>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Quad acc(a == b ? 1 : 0);
      for (std::size_t c = 0; c < V.size(); ++c) acc += fu[a] / (fv[c] * (U[a] - V[c]) * (U[b] - V[c]));
      m[a][b] = acc;
    }
  Quad c(1);
  const long long uexp = which == 1 ? -Q : -Q + N - shift;
  const long long vexp = which == 1 ? L - N + shift - Q : L - N - Q;
  for (const auto& u : U) c *= qpow(Quad(1) - u, uexp);
  for (const auto& v : V) {
    c *= qpow(v, vexp) * qenergy(v, t, params);
    for (const auto& u : U) c /= v - u;
  }
  return c * quad_det(std::move(m));
}

// Mean of g over M nodes of |z| = r in quad precision, tree reduction.
template <class G>
cplx quad_circle_mean(double r, int M, G&& g) {
  std::vector<Quad> vals(M);
  const QuadReal two_pi = 2 * boost::math::constants::pi<QuadReal>();
  tbb::parallel_for(0, M, [&](int m) {
    const Quad z = Quad(r) * exp(Quad(0, two_pi * (m + QuadReal(0.5)) / M));
    vals[m] = g(z);
  });
  while (vals.size() > 1) {
    std::vector<Quad> next;
    for (std::size_t i = 0; i + 1 < vals.size(); i += 2) next.push_back(vals[i] + vals[i + 1]);
    if (vals.size() % 2) next.push_back(vals.back());
    vals.swap(next);
  }
  const Quad mean = vals.front() / Quad(M);
  return {static_cast<double>(real(mean)), static_cast<double>(imag(mean))};
}

}  // namespace

InitialCondition InitialCondition::flat(int d, int delta, const RingParams& params) {
  params.validate();
  if (d < 2 || params.L != d * params.N) throw ConfigError("flat initial condition needs L = dN, d >= 2");
  if (delta < 0 || delta >= d) throw ConfigError("flat offset must satisfy 0 <= delta < d");
  InitialCondition ic;
  ic.kind = Kind::Flat;
  ic.d = d;
  ic.delta = delta;
  for (int i = 0; i < params.N; ++i) ic.resolved.push_back(i * d + delta);
  return ic;
}

InitialCondition InitialCondition::step1(int m, const RingParams& params) {
  params.validate();
  if (m < 0 || m > params.L - params.N) throw ConfigError("step1 shift must satisfy 0 <= m <= L-N");
  InitialCondition ic;
  ic.kind = Kind::Step1;
  ic.shift = m;
  for (int i = 0; i < params.N; ++i) ic.resolved.push_back(i + m);
  return ic;
}

InitialCondition InitialCondition::step2(int k, const RingParams& params) {
  params.validate();
  if (k < 0 || k > params.N) throw ConfigError("step2 shift must satisfy 0 <= k <= N");
  InitialCondition ic;
  ic.kind = Kind::Step2;
  ic.shift = k;
  for (int i = 0; i < k; ++i) ic.resolved.push_back(i);
  for (int i = k; i < params.N; ++i) ic.resolved.push_back(params.L - params.N + i);
  return ic;
}

InitialCondition InitialCondition::general(const Configuration& y, const RingParams& params) {
  params.validate();
  if (static_cast<int>(y.size()) != params.N || !is_valid(y, params.L)) throw ConfigError("initial configuration is not a valid state");
  InitialCondition ic;
  ic.resolved = y;
  return ic;
}

cplx colsum_det(const ColumnEntry& entry, const CVector& roots, int N) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(N, N);
  for (const auto& lam : roots)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) a(i, j) += entry(i, j, lam);
  return det_of(a);
}

cplx colsum_det(const ColumnEntry& entry, cplx z, const RingParams& params) {
  params.validate();
  return colsum_det(entry, q_polynomial_roots(ipow(z, params.L), params), params.N);
}

double current_cdf(const Configuration& y, long long Q, double t, const RingParams& params,
                   double radius, int nodes) {
  params.validate();
  check_increasing(y, params.N, "Y");
  if (t < 0) throw ConfigError("t must be nonnegative");
  const int L = params.L, N = params.N;
  const cplx v = circle_quadrature(0.0, radius, nodes, [&](cplx z) {
    const CVector roots = q_polynomial_roots(ipow(z, L), params);
    const cplx det = colsum_det(
        [&](int i, int j, cplx lam) {
          return ipow(1.0 - 1.0 / lam, Q + j - i) * ipow(lam, y[j] + 1) * energy_of(lam, t, params) /
                 (static_cast<double>(L) * lam - static_cast<double>(L - N));
        },
        roots, N);
    return det * ipow(z, -Q * L);
  });
  return real_checked(sign_pow((N + 1) * Q) * v, "current_cdf");
}

double current_cdf_alt(const Configuration& y, long long Q, double t, const RingParams& params,
                       double radius, int nodes) {
  params.validate();
  check_increasing(y, params.N, "Y");
  const int L = params.L, N = params.N;
  if (Q % N != 0) throw ConfigError("alternative form needs Q to be a multiple of N");
  const long long qd = Q * L / N;
  const double rho = params.rho();
  const cplx v = circle_quadrature(0.0, radius, nodes, [&](cplx z) {
    const CVector roots = q_polynomial_roots(ipow(z, L), params);
    return colsum_det(
        [&](int i, int j, cplx lam) {
          return ipow(1.0 - 1.0 / lam, j - i) * ipow(lam, y[j] + 1 - qd) * energy_of(lam, t, params) /
                 (static_cast<double>(L) * (lam - (1.0 - rho)));
        },
        roots, N);
  });
  const long long c = static_cast<long long>((N - 1) * (N - 2) / 2);
  return real_checked(sign_pow(c * Q) * v, "current_cdf_alt");
}

double u_bl(const std::vector<int>& y, const std::vector<int>& x, double t,
            const QuadratureBudget& budget, const RingParams& params, double radius) {
  params.validate();
  budget.validate();
  check_increasing(y, params.N, "Y");
  check_increasing(x, params.N, "X");
  if (!(radius > critical_radius(params))) throw ConfigError("u_bl radius must exceed r0");
  const int L = params.L, N = params.N;
  const double rho = params.rho();
  const cplx v = circle_quadrature(0.0, radius, budget.nodes_z, [&](cplx z) {
    const CVector roots = q_polynomial_roots(ipow(z, L), params);
    return colsum_det(
        [&](int i, int j, cplx lam) {
          return ipow(1.0 - 1.0 / lam, j - i + 1) * ipow(lam, y[j] - x[i] + 1) *
                 energy_of(lam, t, params) / (static_cast<double>(L) * (lam - (1.0 - rho)));
        },
        roots, N);
  });
  return real_checked(v, "u_bl");
}

std::vector<int> shifted_initial(const Configuration& y, int m, const RingParams& params) {
  const int N = params.N, L = params.L;
  int k = m / N, j = m % N;
  if (j < 0) {
    j += N;
    --k;
  }
  std::vector<int> out;
  out.reserve(N);
  for (int i = 0; i < j; ++i) out.push_back(y[N - j + i] - (k + 1) * L);
  for (int i = 0; i < N - j; ++i) out.push_back(y[i] - k * L);
  return out;
}

ImagesResult images_sum(const Configuration& y, const Configuration& x, cplx zeta, double t,
                        int m_trunc, const QuadratureBudget& budget, const RingParams& params) {
  params.validate();
  if (m_trunc < 1) throw ConfigError("M_trunc must be at least 1");
  ImagesResult res{0.0, 0.0};
  for (int m = -m_trunc; m <= m_trunc; ++m) {
    const auto ym = shifted_initial(y, m, params);
    const cplx term = u_bl(ym, x, t, budget, params) * zeta_shift(ym, x, zeta);
    res.value += term;
    if (std::abs(m) == m_trunc) res.boundary_increment = std::max(res.boundary_increment, std::abs(term));
  }
  return res;
}

QzFactors qz_factors(cplx w, const BetheRootSet& set) {
  if (!set.classified) throw ConfigError("root set is not classified");
  QzFactors f{1.0, 1.0};
  for (int i : set.q0) f.q0 *= w - set.roots[i];
  for (int i : set.q1) f.q1 *= w - set.roots[i];
  return f;
}

cplx q1_derivative(int index, const BetheRootSet& set) {
  if (!set.classified) throw ConfigError("root set is not classified");
  cplx acc = 1.0;
  for (int i : set.q1)
    if (i != index) acc *= set.roots[index] - set.roots[i];
  return acc;
}

double flat_cdf(int d, int delta, long long Q, double t, double r, const QuadratureBudget& budget,
                const RingParams& params) {
  budget.validate();
  InitialCondition::flat(d, delta, params);
  check_radius(r, params);
  {
    FredholmNode nd = fredholm_node(to_quad(std::polar(r, kPi / budget.nodes_z)), params, true);
    const Quad val = flat_integrand(nd, d, delta, Q, t, params);
    const int nv = static_cast<int>(nd.V.size());
    std::reverse(nd.U.begin(), nd.U.end());
    std::reverse(nd.partner.begin(), nd.partner.end());
    std::reverse(nd.V.begin(), nd.V.end());
    for (auto& k : nd.partner) k = nv - 1 - k;
    const Quad alt = flat_integrand(nd, d, delta, Q, t, params);
    if (abs(alt - val) > QuadReal(1e-6) * std::max(QuadReal(1), QuadReal(abs(val))))
      throw NumericalError("flat_cdf: branch-consistency failure under root reordering");
  }
  const cplx v = quad_circle_mean(r, budget.nodes_z, [&](const Quad& z) {
    return flat_integrand(fredholm_node(z, params, true), d, delta, Q, t, params);
  });
  return real_checked(v, "flat_cdf");
}

double step_cdf(int which, int shift, long long Q, double t, double r,
                const QuadratureBudget& budget, const RingParams& params) {
  budget.validate();
  if (which == 1)
    InitialCondition::step1(shift, params);
  else if (which == 2)
    InitialCondition::step2(shift, params);
  else
    throw ConfigError("step case must be 1 or 2");
  check_radius(r, params);
  const cplx v = quad_circle_mean(r, budget.nodes_z, [&](const Quad& z) {
    return step_integrand(fredholm_node(z, params, false), which, shift, Q, t, params);
  });
  return real_checked(v, "step_cdf");
}

}  // namespace pushasep
