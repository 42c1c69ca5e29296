#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "pushasep/ring_model.hpp"

namespace pushasep {

struct Event {
  enum class Kind { Right, Push };
  double time = 0.0;
  Kind kind = Kind::Right;
  int particle = 0;  // 1-based index of the particle whose clock fired
  int length = 1;    // block length for pushes
  Configuration state;
  CurrentRecord currents;  // cumulative after the event
};

struct Trajectory {
  std::vector<Event> events;
  Configuration final;
  CurrentRecord currents;
  std::uint64_t seed = 0;
};

// Seed for trial i of a run seeded with `seed` (splitmix64 of the pair).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial);

// Gillespie run up to t_end. Right attempts onto an occupied site are
// rejected and not recorded.
Trajectory run(const Configuration& y, double t_end, std::uint64_t seed, const RingParams& params,
               bool record_events = true);

struct DistributionTable {
  std::vector<Configuration> states;  // enumerate_states order
  std::vector<double> prob;
  std::vector<double> stderr_;
  std::int64_t trials = 0;
};

DistributionTable empirical_transition(const Configuration& y, double t, std::int64_t trials,
                                       std::uint64_t seed, const RingParams& params);

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

// Histogram of Q_{L-1}(t) over the trials.
struct EmpiricalCurrentLaw {
  std::map<std::int64_t, std::int64_t> counts;
  std::int64_t trials = 0;

  // Fraction with Q_{L-1} >= Q and its binomial standard error.
  Estimate tail(std::int64_t Q) const;
};

EmpiricalCurrentLaw empirical_current_law(const Configuration& y, double t, std::int64_t trials,
                                          std::uint64_t seed, const RingParams& params);

Estimate empirical_current_cdf(const Configuration& y, double t, std::int64_t Q,
                               std::int64_t trials, std::uint64_t seed, const RingParams& params);

}  // namespace pushasep
