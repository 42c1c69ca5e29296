#pragma once

#include <vector>

#include "pushasep/ring_model.hpp"

namespace pushasep {

// Li_s(z) for s in {1/2, 3/2, 5/2} (any non-integer s > 0 works). Direct
// series for |z| <= 0.6, Bose expansion in log z elsewhere.
cplx polylog(double s, cplx z, double tol = 1e-16);
// Li_s(e^mu); avoids forming e^mu when mu is the natural variable.
cplx polylog_exp(double s, cplx mu, double tol = 1e-16);

struct AuxValues {
  cplx A1, A2, A3, B;
};

AuxValues aux_functions(cplx z);

// xi_k = -sqrt(-2 Log z + 4 pi i k), k = -K..K, stored at index k + K.
struct SMinusSet {
  cplx z;
  int K = 0;
  std::vector<cplx> xi;
};

SMinusSet s_minus(cplx z, int K);

enum class LimitKind { Flat, Step };

// Integral of Li_{1/2}(e^{-w^2/2}) from -inf to xi along (-inf, Re xi] and
// then vertically; requires arg xi in (3pi/4, 5pi/4).
cplx psi_integral(cplx xi);
// -tau xi^3/3 + x xi - c * psi_integral(xi), c = 1/sqrt(2 pi) (flat) or
// sqrt(2/pi) (step).
cplx psi_exponent(cplx xi, double x, double tau, LimitKind kind);

// Small radii alias the large negative Laurent modes of the z-integrand at
// negative x, hence the radius close to 1.
struct LimitParams {
  int K = 24;
  int Mz = 256;
  double rz = 0.9;
  void validate() const;
};

struct LimitValue {
  double value = 0.0;
  double imag_residue = 0.0;
  double tail_estimate = 0.0;  // largest kernel entry touching |k| = K
};

// Per-node data (S_-(z), psi integrals, auxiliary functions) shared across
// x, tau and gamma.
class LimitTables {
 public:
  explicit LimitTables(const LimitParams& lp);

  LimitValue f1(double x, double tau) const;
  LimitValue f2(double x, double tau, double gamma) const;
  const LimitParams& params() const { return lp_; }

 private:
  struct Node {
    cplx z;
    AuxValues aux;
    std::vector<cplx> xi, integral;
  };
  LimitParams lp_;
  std::vector<Node> nodes_;
};

LimitValue f1(double x, double tau, const LimitParams& lp = {});
LimitValue f2(double x, double tau, double gamma, const LimitParams& lp = {});

struct ScalingConstants {
  double v, r, vshock;
};

ScalingConstants scaling_constants(double rho, double p);
ScalingConstants scaling_constants(const RingParams& params);

// Density at which vshock vanishes; requires p > q.
double critical_density(double p);

enum class ScalingKind { Flat, Step1a, Step1b, Step2a, Step2b };

// A finite-L evaluation point: time t, the shift used (m or k), the
// centering c and scale s such that the event is Q_{L-1}(t) >= c - x s,
// the integer level Q = ceil(c - x s), and the limit arguments.
struct ScalingPoint {
  double t = 0.0;
  int shift = 0;
  double centering = 0.0;
  double scale = 0.0;
  long long Q = 0;
  double limit_x = 0.0;
  double limit_tau = 0.0;
};

// shift is used only by the (b) cases; the (a) cases derive it from gamma.
ScalingPoint scaling_map(ScalingKind kind, const RingParams& params, double tau, double x,
                         double gamma = 0.0, int shift = 0);

}  // namespace pushasep
