#include "pushasep/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <tbb/parallel_for.h>

#include "pushasep/errors.hpp"

namespace pushasep {

namespace {

constexpr std::int64_t kChunk = 1024;

int wrap(int s, int L) { return ((s % L) + L) % L; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_inputs(const Configuration& y, double t, const RingParams& params) {
  params.validate();
  if (static_cast<int>(y.size()) != params.N || !is_valid(y, params.L))
    throw ConfigError("invalid initial configuration");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("time must be finite and >= 0");
}

// Runs trials [0, trials) in fixed chunks; `body(chunk_index, begin, end)`
// writes into per-chunk storage so the merge order is fixed.
template <class Body>
void for_chunks(std::int64_t trials, Body&& body) {
  const std::int64_t chunks = (trials + kChunk - 1) / kChunk;
  tbb::parallel_for(std::int64_t(0), chunks, [&](std::int64_t c) {
    body(c, c * kChunk, std::min(trials, (c + 1) * kChunk));
  });
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(splitmix64(seed) ^ trial);
}

Trajectory run(const Configuration& y, double t_end, std::uint64_t seed, const RingParams& params,
               bool record_events) {
  check_inputs(y, t_end, params);
  const int L = params.L, N = params.N;
  const double p = params.p;

  Trajectory tr;
  tr.seed = seed;
  tr.currents.edge_q.assign(L, 0);
  Configuration x = y;
  std::vector<char> occ(L, 0);
  for (int s : x) occ[s] = 1;

  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> clock(static_cast<double>(N));
  std::uniform_int_distribution<int> pick(0, N - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  double time = 0.0;
  while (true) {
    time += clock(gen);
    if (time > t_end) break;
    const int i = pick(gen);
    Event ev;
    ev.time = time;
    ev.particle = i + 1;
    if (coin(gen) < p) {
      const int from = x[i], to = wrap(from + 1, L);
      if (occ[to]) continue;
      occ[from] = 0;
      occ[to] = 1;
      x[i] = to;
      tr.currents.global_q += 1;
      tr.currents.edge_q[from] += 1;
      ev.kind = Event::Kind::Right;
    } else {
      // Maximal block of occupied sites ending at x[i], scanning left.
      int k = 1;
      while (k < N && occ[wrap(x[i] - k, L)]) ++k;
      for (int m = 0; m < k; ++m) {
        const int from = wrap(x[i] - m, L);
        tr.currents.edge_q[wrap(from - 1, L)] -= 1;
      }
      if (k < L) {
        occ[x[i]] = 0;
        occ[wrap(x[i] - k, L)] = 1;
      }
      for (int m = 0; m < k; ++m) {
        const int j = wrap(i - m, N);
        x[j] = wrap(x[j] - 1, L);
      }
      tr.currents.global_q -= k;
      ev.kind = Event::Kind::Push;
      ev.length = k;
    }
    std::sort(x.begin(), x.end());
    if (record_events) {
      ev.state = x;
      ev.currents = tr.currents;
      tr.events.push_back(std::move(ev));
    }
  }
  tr.final = x;
  return tr;
}

DistributionTable empirical_transition(const Configuration& y, double t, std::int64_t trials,
                                       std::uint64_t seed, const RingParams& params) {
  check_inputs(y, t, params);
  if (trials < 1) throw ConfigError("trials must be >= 1");
  DistributionTable table;
  table.states = enumerate_states(params);
  table.trials = trials;
  const std::size_t dim = table.states.size();
  std::vector<std::vector<std::int64_t>> partial((trials + kChunk - 1) / kChunk,
                                                 std::vector<std::int64_t>(dim, 0));
  for_chunks(trials, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    for (std::int64_t n = b; n < e; ++n) {
      const auto tr = run(y, t, derive_seed(seed, n), params, false);
      ++partial[c][state_index(tr.final, params.L)];
    }
  });
  table.prob.assign(dim, 0.0);
  table.stderr_.assign(dim, 0.0);
  for (std::size_t s = 0; s < dim; ++s) {
    std::int64_t count = 0;
    for (const auto& part : partial) count += part[s];
    const double f = static_cast<double>(count) / trials;
    table.prob[s] = f;
    table.stderr_[s] = std::sqrt(f * (1.0 - f) / trials);
  }
  return table;
}

Estimate EmpiricalCurrentLaw::tail(std::int64_t Q) const {
  std::int64_t hits = 0;
  for (auto it = counts.lower_bound(Q); it != counts.end(); ++it) hits += it->second;
  Estimate est;
  est.value = trials > 0 ? static_cast<double>(hits) / trials : 0.0;
  est.stderr_ = trials > 0 ? std::sqrt(est.value * (1.0 - est.value) / trials) : 0.0;
  return est;
}

EmpiricalCurrentLaw empirical_current_law(const Configuration& y, double t, std::int64_t trials,
                                          std::uint64_t seed, const RingParams& params) {
  check_inputs(y, t, params);
  if (trials < 1) throw ConfigError("trials must be >= 1");
  std::vector<std::map<std::int64_t, std::int64_t>> partial((trials + kChunk - 1) / kChunk);
  for_chunks(trials, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    for (std::int64_t n = b; n < e; ++n) {
      const auto tr = run(y, t, derive_seed(seed, n), params, false);
      ++partial[c][tr.currents.edge_q[params.L - 1]];
    }
  });
  EmpiricalCurrentLaw law;
  law.trials = trials;
  for (const auto& part : partial)
    for (const auto& [q, n] : part) law.counts[q] += n;
  return law;
}

Estimate empirical_current_cdf(const Configuration& y, double t, std::int64_t Q,
                               std::int64_t trials, std::uint64_t seed, const RingParams& params) {
  return empirical_current_law(y, t, trials, seed, params).tail(Q);
}

}  // namespace pushasep
