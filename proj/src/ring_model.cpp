#include "pushasep/ring_model.hpp"

#include <algorithm>
#include <string>

#include "pushasep/errors.hpp"

namespace pushasep {

void RingParams::validate() const {
  if (L < 1) throw ConfigError("L must be positive");
  if (N < 1 || N > L) throw ConfigError("N must satisfy 1 <= N <= L");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0,1]");
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool is_valid(const Configuration& x, int L) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] >= L) return false;
    if (i > 0 && x[i] <= x[i - 1]) return false;
  }
  return true;
}

std::vector<Configuration> enumerate_states(const RingParams& params) {
  params.validate();
  const int L = params.L, N = params.N;
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(binomial(L, N)));
  Configuration x(N);
  for (int i = 0; i < N; ++i) x[i] = i;
  while (true) {
    out.push_back(x);
    int i = N - 1;
    while (i >= 0 && x[i] == L - N + i) --i;
    if (i < 0) break;
    ++x[i];
    for (int j = i + 1; j < N; ++j) x[j] = x[j - 1] + 1;
  }
  return out;
}

std::int64_t state_index(const Configuration& x, int L) {
  if (!is_valid(x, L)) return -1;
  const int N = static_cast<int>(x.size());
  std::int64_t rank = 0;
  int prev = -1;
  for (int i = 0; i < N; ++i) {
    for (int v = prev + 1; v < x[i]; ++v) rank += binomial(L - 1 - v, N - 1 - i);
    prev = x[i];
  }
  return rank;
}

std::vector<bool> to_occupation(const Configuration& x, int L) {
  std::vector<bool> eta(L, false);
  for (int v : x) eta.at(v) = true;
  return eta;
}

Configuration from_occupation(const std::vector<bool>& eta) {
  Configuration x;
  for (std::size_t s = 0; s < eta.size(); ++s)
    if (eta[s]) x.push_back(static_cast<int>(s));
  return x;
}

namespace {

void check_index(int i, int N) {
  if (i < 1 || i > N) throw ConfigError("particle index out of range: " + std::to_string(i));
}

int mod(int a, int L) { return ((a % L) + L) % L; }

// d(x_{i+k}, x_i) with indices beyond N wrapping around the ring.
int ring_distance(const Configuration& x, int i, int k, int L) {
  const int N = static_cast<int>(x.size());
  if (i + k > N) return L + x[i + k - N - 1] - x[i - 1];
  return x[i + k - 1] - x[i - 1];
}

}  // namespace

Source predecessor_right(const Configuration& x, int i, const RingParams& params) {
  const int N = params.N, L = params.L;
  check_index(i, N);
  Source s;
  if (i == 1 && x[0] == 0) {
    s.x.assign(x.begin() + 1, x.end());
    s.x.push_back(L - 1);
  } else {
    s.x = x;
    s.x[i - 1] -= 1;
  }
  s.valid = is_valid(s.x, L);
  return s;
}

Source predecessor_push(const Configuration& x, int i, int k, const RingParams& params) {
  const int N = params.N, L = params.L;
  check_index(i, N);
  if (k < 1 || k > N) throw ConfigError("push length out of range: " + std::to_string(k));
  Source s;
  s.x.resize(N);
  const int last = std::min(i + k - 1, N);
  for (int j = 1; j <= N; ++j) {
    int shift = (j >= i && j <= last) ? 1 : 0;
    if (j >= 1 && j <= i + k - 1 - N) shift += 1;
    s.x[j - 1] = mod(x[j - 1] + shift, L);
  }
  if (x[N - 1] == L - 1 && i <= N && N <= i + k - 1) {
    std::rotate(s.x.begin(), s.x.end() - 1, s.x.end());
  }
  const bool adjacent = ring_distance(x, i, k - 1, L) == k - 1;
  s.valid = adjacent && is_valid(s.x, L);
  return s;
}

CVector apply_generator(const CVector& f, cplx zeta, const RingParams& params) {
  const auto states = enumerate_states(params);
  if (f.size() != states.size()) throw ConfigError("vector size does not match the state space");
  const int N = params.N, L = params.L;
  CVector out(states.size(), cplx(0.0));
  for (std::size_t a = 0; a < states.size(); ++a) {
    const auto& x = states[a];
    cplx acc = 0.0;
    for (int i = 1; i <= N; ++i) {
      const auto r = predecessor_right(x, i, params);
      if (r.valid) acc += params.p * (zeta * f[state_index(r.x, L)] - f[a]);
      for (int k = 1; k <= N; ++k) {
        const auto s = predecessor_push(x, i, k, params);
        if (s.valid) acc += params.q() * (std::pow(zeta, -k) * f[state_index(s.x, L)] - f[a]);
      }
    }
    out[a] = acc;
  }
  return out;
}

std::int64_t local_from_global(const Configuration& x, const Configuration& y,
                               std::int64_t qglobal, int j, const RingParams& params) {
  const int L = params.L;
  if (j < 0 || j >= L) throw ConfigError("edge index out of range");
  std::int64_t shift = 0;
  for (std::size_t i = 0; i < x.size(); ++i) shift += x[i] - y[i];
  const std::int64_t num = qglobal - shift;
  if (num % L != 0) throw NumericalError("global current inconsistent with displacement");
  std::int64_t below = 0;
  for (int v : x) below -= (v <= j);
  for (int v : y) below += (v <= j);
  return num / L + below;
}

}  // namespace pushasep
