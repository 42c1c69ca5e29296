#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pushasep/bethe.hpp"
#include "pushasep/ring_model.hpp"

namespace pushasep {

enum class ContourVariant { Cond, CondPrime };

// Radii of the z contours (eps_prime, R_prime) and of the w contours
// (R, eps1 around 0, eps2 around 1).
struct ContourSpec {
  double eps_prime = 0.3;
  double R_prime = 0.0;
  double R = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double beta = 1.5;
  double beta1 = 0.0;
  double beta2 = 0.0;
  ContourVariant variant = ContourVariant::Cond;
  double alpha0 = 1.0;
  double alpha1 = 1.0;
};

struct SpecOverrides {
  std::optional<double> beta, beta1, beta2, alpha0, alpha1;
};

// Midpoint exponents by default; CondPrime is selected when 2N = L.
ContourSpec make_spec(const RingParams& params, double eps_prime = 0.3,
                      const SpecOverrides& overrides = {});

struct QuadratureBudget {
  int nodes_z = 64;
  int nodes_w = 48;
  bool rescale = true;
  void validate() const;
};

enum class Measure { DzOverZ, Dz };

// (1/2 pi i) times the contour integral of f(z) dz/z (or f(z) dz) over the
// circle |z - center| = radius, trapezoid rule with nodes at angles 2 pi (m + 1/2)/M.
cplx circle_quadrature(cplx center, double radius, int M, const std::function<cplx(cplx)>& f,
                       Measure measure = Measure::DzOverZ);

// zeta^{sum x - sum y}.
cplx zeta_shift(const std::vector<int>& y, const std::vector<int>& x, cplx zeta);

// Table of generating-series values G(X, Y) over the state space, X = row,
// Y = column, both in enumerate_states order.
using GfTable = Eigen::MatrixXcd;

// (N+1)-fold contour integral.
cplx gf_full(const Configuration& y, const Configuration& x, cplx zeta, double t,
             const ContourSpec& spec, const QuadratureBudget& budget, const RingParams& params);
GfTable gf_full_table(cplx zeta, double t, const ContourSpec& spec, const QuadratureBudget& budget,
                      const RingParams& params);

// u0(zeta) plus the z-circle difference of the sum over ordered tuples of
// distinct roots of q_z.
cplx gf_onefold(const Configuration& y, const Configuration& x, cplx zeta, double t,
                const ContourSpec& spec, const QuadratureBudget& budget, const RingParams& params);
GfTable gf_onefold_table(cplx zeta, double t, const ContourSpec& spec,
                         const QuadratureBudget& budget, const RingParams& params);

// 1/C(L,N) when zeta^L = 1, otherwise the small-circle quadrature below.
cplx u0(const Configuration& y, const Configuration& x, cplx zeta, double t,
        const ContourSpec& spec, const QuadratureBudget& budget, const RingParams& params);
// Small-circle integral restricted to tuples drawn from Q1(z).
cplx u0_quadrature(const Configuration& y, const Configuration& x, cplx zeta, double t,
                   double radius, int nodes, const RingParams& params);

// Coupled roots for a fixed zeta together with the stationary value u0.
struct SpectralData {
  RingParams params;
  cplx zeta;
  std::vector<BetheTuple> tuples;
  bool stationary = false;  // zeta^L = 1
};

SpectralData prepare_spectral(cplx zeta, const RingParams& params,
                              const CoupledRootOptions& opt = {});

// r(lambda) = L - sum 1/(lambda_i - (1 - rho)).
cplx r_coefficient(const CVector& lambdas, const RingParams& params);

// Finite sum over coupled roots. Each tuple contributes with every ordering
// of its roots and weight L, one for each z with the same z^L.
cplx gf_spectral(const SpectralData& data, const Configuration& y, const Configuration& x,
                 double t);
cplx gf_spectral(const Configuration& y, const Configuration& x, cplx zeta, double t,
                 const RingParams& params);

}  // namespace pushasep
