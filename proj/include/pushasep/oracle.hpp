#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "pushasep/ring_model.hpp"

namespace pushasep {

using CMatrix = Eigen::MatrixXcd;

struct OracleOptions {
  std::int64_t state_cap = 20000;
};

// Dense matrix of H_zeta acting on state-indexed vectors.
CMatrix build_generator(const RingParams& params, cplx zeta, const OracleOptions& opt = {});

// g(Y, X; zeta; t) for all X, i.e. exp(t H_zeta) applied to the delta at Y.
CVector evolve_master(const Configuration& y, double t, cplx zeta, const RingParams& params,
                      const OracleOptions& opt = {});

// exp(t H_zeta); column Y holds g(Y, . ; zeta; t).
CMatrix transition_matrix(double t, cplx zeta, const RingParams& params,
                          const OracleOptions& opt = {});

// Joint law of (X(t), Q(t)) recovered by a discrete Fourier transform in zeta.
struct JointCurrentLaw {
  std::int64_t qmin = 0;
  std::int64_t qmax = 0;
  int grid = 0;                           // number of zeta nodes
  std::vector<std::vector<double>> prob;  // prob[x][q - qmin]
  double tail_mass = 0.0;                 // mass aliased outside [qmin, qmax]
};

// The window is chosen from t when qmin > qmax.
JointCurrentLaw current_pmf(const Configuration& y, double t, const RingParams& params,
                            std::int64_t qmin = 1, std::int64_t qmax = 0,
                            const OracleOptions& opt = {});

// P(Q_{L-1}(t) = Q) for Q in [first, first + pmf.size()).
struct LocalCurrentLaw {
  std::int64_t first = 0;
  std::vector<double> pmf;
  double tail_mass = 0.0;
  double cdf_tail(std::int64_t Q) const;  // P(Q_{L-1}(t) >= Q)
};

LocalCurrentLaw local_current_law(const Configuration& y, double t, const RingParams& params,
                                  const OracleOptions& opt = {});

double local_current_cdf_oracle(const Configuration& y, double t, std::int64_t Q,
                                const RingParams& params, const OracleOptions& opt = {});

// All C(L,N) eigenvalues of H_zeta.
CVector spectrum(cplx zeta, const RingParams& params, const OracleOptions& opt = {});

}  // namespace pushasep
