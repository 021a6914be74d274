#pragma once

#include "nebp/factors.hpp"
#include "nebp/game.hpp"
#include "nebp/instance.hpp"

namespace nebp {

struct BPParams {
  enum class Schedule { kSequential, kRandomPermutation };

  double damping = 0.5;       // new = (1 - damping) * computed + damping * old
  double tol = 1e-8;          // max componentwise change to declare convergence
  int max_iters = 10000;
  double floor = 1e-12;       // underflow guard for the nu division
  uint64_t seed = 0;          // schedule shuffling
  Schedule schedule = Schedule::kRandomPermutation;
};

struct ConvergenceReport {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  int floored_users = 0;
};

struct Marginals {
  std::vector<Triple> edge;                 // b_us(y) per edge id, normalized
  std::vector<double> user_disconnected;    // P(all edges of u are -1)
  std::vector<double> present_disconnected; // P(t_u = 1 and all edges -1)
  std::vector<Pair> presence;               // model marginal of t_u
};

struct BPRun {
  Marginals marginals;
  ConvergenceReport report;
};

// Sum-product over the edge-variable factor graph with the presence values
// frozen to t: averages observables over the NEs of one realization.
BPRun run_fixed_t(const Instance& inst, const ServiceConfig& x, const PresencePattern& t,
                  const BPParams& params = {});

// The four-message scheme: presence messages nu/nu_hat are iterated together
// with the edge messages, so the average over NEs and over user presence is
// one fixed point.
BPRun run_mirror(const Instance& inst, const ServiceConfig& x, const BPParams& params = {});

// Instance-level wrappers around the factor kernels; messages are aligned
// with inst.user_edges[u] / inst.unit_edges[s].
UserFactorResult user_factor_sweep(const Instance& inst, UserId u,
                                   std::span<const Triple> incoming_mu, const Pair& nu_u);
std::vector<Triple> unit_factor_sweep(const Instance& inst, bool unit_on, UnitId s,
                                      std::span<const Triple> incoming_mu_hat);

}  // namespace nebp
