#pragma once

#include <functional>

#include "nebp/observables.hpp"

namespace nebp {

// Evaluates the observables of one activation configuration. Estimators set
// converged=false instead of throwing when an estimate is unreliable.
using Estimator = std::function<ObservableSet(const Instance&, const ServiceConfig&)>;

Estimator make_mirror_estimator(const BPParams& params = {});
Estimator make_fixed_t_sampled_estimator(int sample_size, uint64_t seed,
                                         const BPParams& params = {}, int workers = 1);
Estimator make_sampled_estimator(int sample_size, uint64_t seed, const EnumLimits& limits = {},
                                 int workers = 1);

struct StopRule {
  enum class Kind { kNone, kMaxSteps, kCumulativeRelDrop };
  Kind kind = Kind::kCumulativeRelDrop;
  int max_steps = 0;
  double theta = 0.005;

  static StopRule none() { return {Kind::kNone, 0, 0.0}; }
  static StopRule steps(int k) { return {Kind::kMaxSteps, k, 0.0}; }
  static StopRule rel_drop(double theta) { return {Kind::kCumulativeRelDrop, 0, theta}; }
};

struct DecimationStep {
  UnitId switched_off = kNone;
  ServiceConfig x_after;
  ObservableSet observables;
  double drop_abs = 0.0;            // O(previous) - O(current)
  double drop_rel_cumulative = 0.0; // (O(all-on) - O(current)) / O(all-on)
  int flagged_candidates = 0;       // candidates excluded for non-convergence
};

struct DecimationTrajectory {
  ObservableSet initial;            // all units on
  std::vector<DecimationStep> steps;
  int chosen_stop = -1;             // last step index the stop rule accepts; -1 keeps all on
};

// Switches off, one at a time, the unit whose removal drops the objective
// Osat the least (ties to the lowest unit id), recording the trajectory.
// Candidate evaluations within a step run in parallel.
DecimationTrajectory greedy_decimation(const Instance& inst, const Estimator& estimator,
                                       const StopRule& stop = {}, int workers = 1);

struct ExhaustiveRow {
  ServiceConfig x;
  ObservableSet observables;
};

struct ExhaustiveResult {
  ServiceConfig best;
  ObservableSet best_observables;
  std::vector<ExhaustiveRow> table;  // all 2^S configurations, mask order
};

// Evaluates F for every activation configuration (S <= 15); the argmax with
// ties broken toward the lexicographically smallest bitmask.
ExhaustiveResult exhaustive_x(const Instance& inst, const Estimator& estimator, int workers = 1);

}  // namespace nebp
