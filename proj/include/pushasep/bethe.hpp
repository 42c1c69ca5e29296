#pragma once

#include <boost/rational.hpp>
#include <vector>

#include "pushasep/ring_model.hpp"

namespace pushasep {

// r0 = rho^rho (1-rho)^(1-rho). At |z| = r0 the polynomial q_z has a double
// root at w = 1 - rho.
double critical_radius(const RingParams& params);

// The L roots of w^{L-N} (w-1)^N = z^L.
struct BetheRootSet {
  cplx z;
  CVector roots;
  bool classified = false;        // set when 0 < |z| < r0
  std::vector<int> q0;            // indices with Re w < 1 - rho
  std::vector<int> q1;            // indices with Re w > 1 - rho, |q1| = N
  std::vector<std::vector<int>> cycles;  // D_k, k = 0..N-1, only when L = dN

  // The root of Q1 sharing the cycle of roots[u]; requires cycles.
  cplx paired_v(int u) const;
};

BetheRootSet q_roots(cplx z, const RingParams& params);

// Roots of w^{L-N} (w-1)^N - s in unspecified order, Newton polished.
CVector q_polynomial_roots(cplx s, const RingParams& params);

// w^{L-N} (w-1)^N and its derivative.
cplx q_poly(cplx w, const RingParams& params);
cplx q_poly_derivative(cplx w, const RingParams& params);

// lambda q_z'(lambda) = (L lambda - (L-N)) / (lambda - 1) at a root of q_z.
cplx lambda_qprime(cplx lambda, const RingParams& params);

// 1 + (-1)^N zeta^L z^{-L} prod (1 - 1/lambda_i).
cplx p_coupling(const CVector& lambdas, cplx z, cplx zeta, const RingParams& params);

// Integer power by repeated squaring; negative exponents allowed.
cplx ipow(cplx base, long long n);

// det[(1 - lambda_j^{-1})^{j-i} lambda_j^{-x_i}]; x may be any integer tuple.
cplx bethe_u(const CVector& lambdas, const std::vector<int>& x);
// prod lambda_j^{y_j}.
cplx bethe_h(const CVector& lambdas, const std::vector<int>& y);
// Permutation-sum form of h(Y) u(X); equal to bethe_h * bethe_u.
cplx amplitude_sum(const CVector& lambdas, const std::vector<int>& y, const std::vector<int>& x);

// det[(1 - (zeta w_j)^{-1})^{j-i} w_j^{-x_i}]. With lambda = zeta w this is
// zeta^{sum x} bethe_u(lambda, x).
cplx bethe_function(const CVector& ws, const Configuration& x, cplx zeta);

// sum p zeta w + q / (zeta w) - 1.
cplx energy(const CVector& ws, cplx zeta, const RingParams& params);
// sum p lambda + q / lambda - 1.
cplx energy_lambda(const CVector& lambdas, const RingParams& params);

struct BetheTuple {
  CVector lambdas;  // roots of q_z, lambda = zeta w
  cplx z;
  cplx zeta;
  cplx energy;
  CVector ws() const;
};

struct CoupledRootOptions {
  double r_min = 0.02;     // annulus in |z|; r_max <= 0 means 1 + rho + 0.05
  double r_max = 0.0;
  int radial_cells = 12;
  int angular_cells = 24;
  double min_diameter = 1e-3;
  double tol = 1e-8;
};

// Solutions of the coupled system with z != 0, found as zeros of the
// symmetric product P(s) = prod_S p_z(lambda_S) in the variable s = z^L.
std::vector<BetheTuple> coupled_roots(cplx zeta, const RingParams& params,
                                      const CoupledRootOptions& opt = {});

// Calls fn(indices) for every increasing k-subset of {0..n-1}.
template <class Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    fn(static_cast<const std::vector<int>&>(idx));
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Calls fn(indices) for every ordered k-tuple of distinct elements of {0..n-1}.
template <class Fn>
void for_each_arrangement(int n, int k, Fn&& fn) {
  std::vector<int> idx(k, 0);
  std::vector<char> used(n, 0);
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == k) {
      fn(static_cast<const std::vector<int>&>(idx));
      return;
    }
    for (int v = 0; v < n; ++v) {
      if (used[v]) continue;
      used[v] = 1;
      idx[pos] = v;
      self(self, pos + 1);
      used[v] = 0;
    }
  };
  rec(rec, 0);
}

// Fuss-Catalan numbers A_m(p, r) = r/m! prod_{i=1}^{m-1} (mp + r - i).
using Rational = boost::rational<long long>;
Rational fuss_catalan(Rational p, Rational r, int m);
double fuss_catalan(double p, double r, int m);

// Truncated series for 1 - 1/lambda of the Q1 root attached to the N-th root
// of unity eta: -Z phi(Z) with Z = -eta z^d and phi = B_{d,d}.
cplx phi_expansion(cplx z, cplx eta, int M, const RingParams& params);

// log Psi(z) = sum_k (-1)^{kN}/k C(kL, kN) z^{kL} and Psi itself, |z| < r0.
cplx log_psi(cplx z, const RingParams& params);
cplx psi_product(cplx z, const RingParams& params);

// prod (w_i - 1) / q_z(w_N) with w_1..w_{N-1} in Q1(z) and w_N the perturbed
// root defined through Psi. Tends to 1/(N C(L,N)) as z -> 0.
cplx limit_ratio(cplx z, const RingParams& params);

}  // namespace pushasep
