#pragma once

#include <functional>

#include "nebp/game.hpp"
#include "nebp/instance.hpp"

namespace nebp {

struct EnumLimits {
  long long node_budget = 1'000'000'000;  // search nodes explored, pruning included
};

// Per-realization averages over the enumerated NE set.
struct ExactResult {
  long long Z = 0;  // number of NEs at this (x, t)
  double W = 0.0;       // mean connected workload
  double N = 0.0;       // mean count of users with every edge at -1
  double Osat = 0.0;    // mean connected satisfaction
  double n_disc_present = 0.0;  // mean count of present users with every edge at -1
  bool defined = false;         // false iff Z == 0
};

// Averages over presence realizations (sampled or fully summed).
struct AveragedResult {
  double W = 0.0, N = 0.0, Osat = 0.0, n_disc_present = 0.0;
  double W_se = 0.0, N_se = 0.0, Osat_se = 0.0;
  long long samples_total = 0;  // realizations drawn (or patterns summed)
  long long samples_used = 0;   // realizations with at least one NE
  long long zero_ne = 0;        // realizations with Z == 0, excluded from the means
  bool defined = false;
};

// Backtracking over present users' choices with capacity pruning and
// determined-best-response pruning; yields each NE's edge assignment exactly
// once and returns Z. Exploration order of users is customizable (the
// solution set does not depend on it).
long long enumerate_nash(const Instance& inst, const ServiceConfig& x, const PresencePattern& t,
                         const std::function<void(const EdgeAssignment&)>& yield,
                         const EnumLimits& limits = {});
long long enumerate_nash(const Instance& inst, const ServiceConfig& x, const PresencePattern& t,
                         const std::function<void(const EdgeAssignment&)>& yield,
                         const std::vector<UserId>& user_order, const EnumLimits& limits = {});

ExactResult exact_observables(const Instance& inst, const ServiceConfig& x,
                              const PresencePattern& t, const EnumLimits& limits = {});

// Empirical mean over sample_size i.i.d. presence draws; realizations without
// NEs are counted and excluded. Deterministic per seed; evaluation of the
// realizations may run on several workers.
AveragedResult sampled_average(const Instance& inst, const ServiceConfig& x, int sample_size,
                               uint64_t seed, const EnumLimits& limits = {}, int workers = 1);

// Exact reference: full sum over all 2^U presence patterns, conditioned on
// Z > 0 (the excluded probability mass shows up in zero_ne as a count).
AveragedResult exact_average(const Instance& inst, const ServiceConfig& x,
                             const EnumLimits& limits = {});

}  // namespace nebp
