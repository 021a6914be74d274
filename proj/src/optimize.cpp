#include "nebp/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace nebp {

Estimator make_mirror_estimator(const BPParams& params) {
  return [params](const Instance& inst, const ServiceConfig& x) {
    BPRun run = run_mirror(inst, x, params);
    return compute_from_marginals(inst, x, run.marginals, Source::kMirrorBP,
                                  run.report.converged);
  };
}

Estimator make_fixed_t_sampled_estimator(int sample_size, uint64_t seed, const BPParams& params,
                                         int workers) {
  if (sample_size < 1) throw param_error("sampled estimator: sample_size must be >= 1");
  return [=](const Instance& inst, const ServiceConfig& x) {
    Rng rng(seed);
    std::vector<PresencePattern> patterns(sample_size);
    for (auto& t : patterns) {
      t.present.resize(inst.n_users);
      for (UserId u = 0; u < inst.n_users; ++u)
        t.present[u] = uniform01(rng) < inst.presence[u] ? 1 : 0;
    }
    struct Per {
      ObservableSet obs;
      bool usable = false;
    };
    std::vector<Per> per(sample_size);
    parallel_for(sample_size, workers, [&](size_t i) {
      try {
        BPRun run = run_fixed_t(inst, x, patterns[i], params);
        per[i].obs = compute_from_marginals(inst, x, run.marginals, Source::kFixedTBP,
                                            run.report.converged);
        per[i].usable = run.report.converged;
      } catch (const degeneracy_error&) {
        per[i].usable = false;  // realization without NEs
      }
    });
    ObservableSet mean;
    mean.source = Source::kFixedTBP;
    long long used = 0;
    for (const Per& p : per) {
      if (!p.usable) continue;
      ++used;
      mean.W += p.obs.W;
      mean.N += p.obs.N;
      mean.Osat += p.obs.Osat;
      mean.F += p.obs.F;
      mean.energy = p.obs.energy;
    }
    if (used == 0) {
      mean.converged = false;
      return mean;
    }
    mean.W /= used;
    mean.N /= used;
    mean.Osat /= used;
    mean.F /= used;
    // Discarding more than half the sample leaves no trustworthy mean.
    mean.converged = used * 2 >= sample_size;
    return mean;
  };
}

Estimator make_sampled_estimator(int sample_size, uint64_t seed, const EnumLimits& limits,
                                 int workers) {
  return [=](const Instance& inst, const ServiceConfig& x) {
    AveragedResult r = sampled_average(inst, x, sample_size, seed, limits, workers);
    if (!r.defined) {
      ObservableSet o;
      o.source = Source::kSampled;
      o.converged = false;
      return o;
    }
    ObservableSet o = compute_exact(inst, x, r);
    o.converged = r.samples_used * 2 >= r.samples_total;
    return o;
  };
}

DecimationTrajectory greedy_decimation(const Instance& inst, const Estimator& estimator,
                                       const StopRule& stop, int workers) {
  if (stop.kind == StopRule::Kind::kMaxSteps && stop.max_steps < 0)
    throw param_error("greedy_decimation: max_steps must be >= 0");
  if (stop.kind == StopRule::Kind::kCumulativeRelDrop && stop.theta < 0)
    throw param_error("greedy_decimation: theta must be >= 0");

  DecimationTrajectory traj;
  ServiceConfig x = ServiceConfig::all_on(inst);
  traj.initial = estimator(inst, x);
  const double base = traj.initial.Osat;
  double previous = base;

  while (x.count_on() > 0) {
    if (stop.kind == StopRule::Kind::kMaxSteps &&
        static_cast<int>(traj.steps.size()) >= stop.max_steps)
      break;

    std::vector<UnitId> candidates;
    for (UnitId s = 0; s < inst.n_units; ++s)
      if (x.on[s]) candidates.push_back(s);
    std::vector<ObservableSet> evals(candidates.size());
    parallel_for(candidates.size(), workers, [&](size_t i) {
      ServiceConfig xc = x;
      xc.on[candidates[i]] = 0;
      evals[i] = estimator(inst, xc);
    });

    int flagged = 0;
    int best = -1;
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (!evals[i].converged) {
        ++flagged;
        continue;
      }
      if (best < 0 || evals[i].Osat > evals[best].Osat) best = static_cast<int>(i);
    }
    if (best < 0)
      throw error("greedy_decimation: every candidate at step " +
                  std::to_string(traj.steps.size() + 1) + " was flagged");

    UnitId off = candidates[best];
    x.on[off] = 0;
    DecimationStep step;
    step.switched_off = off;
    step.x_after = x;
    step.observables = evals[best];
    step.drop_abs = previous - evals[best].Osat;
    step.drop_rel_cumulative = base > 0.0 ? (base - evals[best].Osat) / base : 0.0;
    step.flagged_candidates = flagged;
    previous = evals[best].Osat;
    traj.steps.push_back(std::move(step));

    if (stop.kind == StopRule::Kind::kCumulativeRelDrop &&
        traj.steps.back().drop_rel_cumulative > stop.theta)
      break;
  }

  switch (stop.kind) {
    case StopRule::Kind::kNone:
      traj.chosen_stop = static_cast<int>(traj.steps.size()) - 1;
      break;
    case StopRule::Kind::kMaxSteps:
      traj.chosen_stop = std::min<int>(stop.max_steps, static_cast<int>(traj.steps.size())) - 1;
      break;
    case StopRule::Kind::kCumulativeRelDrop: {
      int last = -1;
      for (size_t i = 0; i < traj.steps.size(); ++i)
        if (traj.steps[i].drop_rel_cumulative <= stop.theta) last = static_cast<int>(i);
      traj.chosen_stop = last;
      break;
    }
  }
  return traj;
}

ExhaustiveResult exhaustive_x(const Instance& inst, const Estimator& estimator, int workers) {
  if (inst.n_units > 15)
    throw resource_error("exhaustive_x: 2^" + std::to_string(inst.n_units) +
                         " configurations is out of reach (limit S <= 15)");
  const uint64_t total = 1ULL << inst.n_units;
  ExhaustiveResult res;
  res.table.resize(total);
  parallel_for(total, workers, [&](size_t mask) {
    ServiceConfig x;
    x.on.resize(inst.n_units);
    for (UnitId s = 0; s < inst.n_units; ++s) x.on[s] = (mask >> s) & 1;
    res.table[mask] = {x, estimator(inst, x)};
  });
  int best = -1;
  for (size_t i = 0; i < res.table.size(); ++i) {
    if (!res.table[i].observables.converged) continue;
    if (best < 0 || res.table[i].observables.F > res.table[best].observables.F) {
      best = static_cast<int>(i);
    } else if (res.table[i].observables.F == res.table[best].observables.F &&
               std::lexicographical_compare(res.table[i].x.on.begin(), res.table[i].x.on.end(),
                                            res.table[best].x.on.begin(),
                                            res.table[best].x.on.end())) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw error("exhaustive_x: no configuration evaluated successfully");
  res.best = res.table[best].x;
  res.best_observables = res.table[best].observables;
  return res;
}

}  // namespace nebp
