#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace pushasep {

using cplx = std::complex<double>;
using Configuration = std::vector<int>;
using CVector = std::vector<cplx>;

// Ring of length L with N particles. Particles jump right at rate p under
// exclusion and left at rate q = 1 - p, pushing the block on their left.
struct RingParams {
  int L = 0;
  int N = 0;
  double p = 1.0;

  double q() const { return 1.0 - p; }
  double rho() const { return static_cast<double>(N) / L; }
  int d() const { return N > 0 && L % N == 0 ? L / N : 0; }
  void validate() const;
};

// Net global current and the per-edge currents; edge j is (j, j+1 mod L).
struct CurrentRecord {
  std::int64_t global_q = 0;
  std::vector<std::int64_t> edge_q;
};

// Source configuration of a master-equation term together with its indicator.
struct Source {
  Configuration x;
  bool valid = false;
};

std::int64_t binomial(int n, int k);
bool is_valid(const Configuration& x, int L);

// All C(L,N) configurations in lexicographic order.
std::vector<Configuration> enumerate_states(const RingParams& params);

// Position of a configuration in enumerate_states order, or -1.
std::int64_t state_index(const Configuration& x, int L);

std::vector<bool> to_occupation(const Configuration& x, int L);
Configuration from_occupation(const std::vector<bool>& eta);

// X^{i,-}: the state from which a right jump of particle i (1-based) leads to x.
Source predecessor_right(const Configuration& x, int i, const RingParams& params);

// X^{i,+k}: the state from which a left push of the block i..i+k-1 leads to x.
Source predecessor_push(const Configuration& x, int i, int k, const RingParams& params);

// (H_zeta f)(X) with f indexed by enumerate_states.
CVector apply_generator(const CVector& f, cplx zeta, const RingParams& params);

// Q_j(t) from the global current Q(t). Throws NumericalError when the triple
// (x, y, qglobal) is inconsistent, i.e. the result is not an integer.
std::int64_t local_from_global(const Configuration& x, const Configuration& y,
                               std::int64_t qglobal, int j, const RingParams& params);

}  // namespace pushasep
