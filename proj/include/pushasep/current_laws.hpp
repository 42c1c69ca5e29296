#pragma once

#include <functional>

#include "pushasep/bethe.hpp"
#include "pushasep/contour.hpp"
#include "pushasep/ring_model.hpp"

namespace pushasep {

struct InitialCondition {
  enum class Kind { Flat, Step1, Step2, General };
  Kind kind = Kind::General;
  int d = 0;      // flat spacing
  int delta = 0;  // flat offset
  int shift = 0;  // m for Step1, k for Step2
  Configuration resolved;

  // (delta, d + delta, ..., (N-1) d + delta) with L = dN.
  static InitialCondition flat(int d, int delta, const RingParams& params);
  // (0, ..., N-1) + m.
  static InitialCondition step1(int m, const RingParams& params);
  // (0, ..., k-1, L-N+k, ..., L-1).
  static InitialCondition step2(int k, const RingParams& params);
  static InitialCondition general(const Configuration& y, const RingParams& params);
};

using ColumnEntry = std::function<cplx(int i, int j, cplx lambda)>;

// det[sum_lambda entry(i, j, lambda)]: by multilinearity this equals the sum
// over all L^N tuples of det[entry(i, j, lambda_j)].
cplx colsum_det(const ColumnEntry& entry, const CVector& roots, int N);
cplx colsum_det(const ColumnEntry& entry, cplx z, const RingParams& params);

// P(Q_{L-1}(t) >= Q). The integrand is analytic in 0 < |z| < inf, so any
// radius is exact; radii near 1 keep z^{-QL} well conditioned.
constexpr double kCurrentRadius = 0.9;

double current_cdf(const Configuration& y, long long Q, double t, const RingParams& params,
                   double radius = kCurrentRadius, int nodes = 64);

// Alternative form valid when Q is a multiple of N.
double current_cdf_alt(const Configuration& y, long long Q, double t, const RingParams& params,
                       double radius = kCurrentRadius, int nodes = 64);

// Transition probability of the model with winding, Y and X arbitrary
// increasing integer tuples. The radius must exceed r0.
double u_bl(const std::vector<int>& y, const std::vector<int>& x, double t,
            const QuadratureBudget& budget, const RingParams& params, double radius = 1.2);

// The periodic shift Y^m.
std::vector<int> shifted_initial(const Configuration& y, int m, const RingParams& params);

struct ImagesResult {
  cplx value;
  double boundary_increment;  // largest |term| at m = +-M_trunc
};

ImagesResult images_sum(const Configuration& y, const Configuration& x, cplx zeta, double t,
                        int m_trunc, const QuadratureBudget& budget, const RingParams& params);

struct QzFactors {
  cplx q0;  // prod over Q0 of (w - u)
  cplx q1;  // prod over Q1 of (w - v)
};

QzFactors qz_factors(cplx w, const BetheRootSet& set);
// q_{z,1}'(v) for v = roots[index] in Q1.
cplx q1_derivative(int index, const BetheRootSet& set);

// Flat initial condition with L = dN, integral over |z| = r, 0 < r < r0.
double flat_cdf(int d, int delta, long long Q, double t, double r, const QuadratureBudget& budget,
                const RingParams& params);

// Step initial conditions: case 1 with shift m, case 2 with shift k.
double step_cdf(int which, int shift, long long Q, double t, double r,
                const QuadratureBudget& budget, const RingParams& params);

}  // namespace pushasep
