#include "pushasep/oracle.hpp"

#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

#include "pushasep/errors.hpp"

namespace pushasep {

CMatrix build_generator(const RingParams& params, cplx zeta, const OracleOptions& opt) {
  params.validate();
  if (std::abs(std::abs(zeta) - 1.0) > 1e-12) throw ConfigError("zeta must lie on the unit circle");
  const std::int64_t dim = binomial(params.L, params.N);
  if (dim > opt.state_cap)
    throw ConfigError("state space has " + std::to_string(dim) + " states, above the cap of " +
                      std::to_string(opt.state_cap));
  const auto states = enumerate_states(params);
  const int N = params.N, L = params.L;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (std::int64_t a = 0; a < dim; ++a) {
    const auto& x = states[a];
    for (int i = 1; i <= N; ++i) {
      const auto r = predecessor_right(x, i, params);
      if (r.valid) {
        h(a, state_index(r.x, L)) += params.p * zeta;
        h(a, a) -= params.p;
      }
      for (int k = 1; k <= N; ++k) {
        const auto s = predecessor_push(x, i, k, params);
        if (!s.valid) continue;
        h(a, state_index(s.x, L)) += params.q() * std::pow(zeta, -k);
        h(a, a) -= params.q();
      }
    }
  }
  return h;
}

CMatrix transition_matrix(double t, cplx zeta, const RingParams& params, const OracleOptions& opt) {
  if (t < 0) throw ConfigError("time must be nonnegative");
  const CMatrix h = build_generator(params, zeta, opt);
  if (t == 0.0) return CMatrix::Identity(h.rows(), h.cols());
  CMatrix e = (t * h).exp();
  if (!e.allFinite()) throw NumericalError("matrix exponential overflowed");
  return e;
}

CVector evolve_master(const Configuration& y, double t, cplx zeta, const RingParams& params,
                      const OracleOptions& opt) {
  const std::int64_t j = state_index(y, params.L);
  if (j < 0 || static_cast<int>(y.size()) != params.N) throw ConfigError("invalid initial configuration");
  const CMatrix e = transition_matrix(t, zeta, params, opt);
  CVector out(e.rows());
  for (Eigen::Index a = 0; a < e.rows(); ++a) out[a] = e(a, j);
  return out;
}

namespace {

int next_pow2(std::int64_t n) {
  int m = 1;
  while (m < n) m <<= 1;
  return m;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

}  // namespace

JointCurrentLaw current_pmf(const Configuration& y, double t, const RingParams& params,
                            std::int64_t qmin, std::int64_t qmax, const OracleOptions& opt) {
  params.validate();
  if (qmin > qmax) {
    // Each event moves the global current by at most N in absolute value.
    const double jumps = t * params.N;
    const auto half = static_cast<std::int64_t>(
        std::ceil(params.N * (jumps + 10.0 * std::sqrt(jumps) + 10.0)));
    qmin = -half;
    qmax = half;
  }
  const std::int64_t width = qmax - qmin + 1;
  const int m = next_pow2(2 * width + 8);
  const std::int64_t j = state_index(y, params.L);
  if (j < 0) throw ConfigError("invalid initial configuration");
  const std::int64_t dim = binomial(params.L, params.N);

  std::vector<CVector> g(m);
  tbb::parallel_for(0, m, [&](int k) {
    const cplx zeta = std::polar(1.0, 2.0 * std::numbers::pi * k / m);
    g[k] = evolve_master(y, t, zeta, params, opt);
  });

  JointCurrentLaw law;
  law.qmin = qmin;
  law.qmax = qmax;
  law.grid = m;
  law.prob.assign(dim, std::vector<double>(width, 0.0));
  // Residue r of q mod m is recovered as (1/m) sum_k zeta_k^{-r} g_k.
  for (std::int64_t x = 0; x < dim; ++x) {
    for (int r = 0; r < m; ++r) {
      cplx acc = 0.0;
      for (int k = 0; k < m; ++k)
        acc += g[k][x] * std::polar(1.0, -2.0 * std::numbers::pi * ((std::int64_t(k) * r) % m) / m);
      const double v = acc.real() / m;
      bool placed = false;
      for (std::int64_t q = qmin; q <= qmax; ++q) {
        if (floor_mod(q, m) == r) {
          law.prob[x][q - qmin] = v;
          placed = true;
          break;
        }
      }
      if (!placed) law.tail_mass += std::abs(v);
    }
  }
  return law;
}

double LocalCurrentLaw::cdf_tail(std::int64_t Q) const {
  double s = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i)
    if (first + static_cast<std::int64_t>(i) >= Q) s += pmf[i];
  return s;
}

LocalCurrentLaw local_current_law(const Configuration& y, double t, const RingParams& params,
                                  const OracleOptions& opt) {
  const auto joint = current_pmf(y, t, params, 1, 0, opt);
  const auto states = enumerate_states(params);
  const int L = params.L;
  std::int64_t lo = 0, hi = -1;
  std::vector<std::pair<std::int64_t, double>> entries;
  for (std::size_t x = 0; x < states.size(); ++x) {
    for (std::int64_t q = joint.qmin; q <= joint.qmax; ++q) {
      const double v = joint.prob[x][q - joint.qmin];
      if (std::abs(v) < 1e-300) continue;
      std::int64_t shift = 0;
      for (int i = 0; i < params.N; ++i) shift += states[x][i] - y[i];
      // Outside the support the DFT only returns rounding noise.
      if (floor_mod(q - shift, L) != 0) continue;
      const std::int64_t ql = local_from_global(states[x], y, q, L - 1, params);
      entries.emplace_back(ql, v);
      if (hi < lo) lo = hi = ql;
      lo = std::min(lo, ql);
      hi = std::max(hi, ql);
    }
  }
  LocalCurrentLaw law;
  law.first = lo;
  law.pmf.assign(hi >= lo ? hi - lo + 1 : 0, 0.0);
  for (const auto& [ql, v] : entries) law.pmf[ql - lo] += v;
  law.tail_mass = joint.tail_mass;
  return law;
}

double local_current_cdf_oracle(const Configuration& y, double t, std::int64_t Q,
                                const RingParams& params, const OracleOptions& opt) {
  return local_current_law(y, t, params, opt).cdf_tail(Q);
}

CVector spectrum(cplx zeta, const RingParams& params, const OracleOptions& opt) {
  const CMatrix h = build_generator(params, zeta, opt);
  Eigen::ComplexEigenSolver<CMatrix> es(h, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  const auto& ev = es.eigenvalues();
  return CVector(ev.data(), ev.data() + ev.size());
}

}  // namespace pushasep
