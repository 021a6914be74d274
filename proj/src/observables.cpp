#include "nebp/observables.hpp"

namespace nebp {

const char* source_name(Source s) {
  switch (s) {
    case Source::kMirrorBP: return "mirror-bp";
    case Source::kFixedTBP: return "fixed-t-bp";
    case Source::kExact: return "exact";
    case Source::kSampled: return "sampled";
  }
  return "?";
}

namespace {

double config_energy(const Instance& inst, const ServiceConfig& x) {
  double e = 0.0;
  for (UnitId s = 0; s < inst.n_units; ++s)
    if (x.on[s]) e += inst.cost[s];
  return e;
}

}  // namespace

ObservableSet compute_from_marginals(const Instance& inst, const ServiceConfig& x,
                                     const Marginals& marginals, Source source, bool converged) {
  ObservableSet o;
  o.source = source;
  o.converged = converged;
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    double used = marginals.edge[e][yi(1)];
    o.W += used * inst.edges[e].w_su;
    o.Osat += used * inst.edges[e].w_us;
  }
  double disc_present = 0.0;
  for (UserId u = 0; u < inst.n_users; ++u) {
    o.N += marginals.user_disconnected[u];
    disc_present += marginals.present_disconnected[u];
  }
  o.energy = config_energy(inst, x);
  o.F = o.Osat - inst.omega * disc_present - inst.alpha * o.energy;
  return o;
}

ObservableSet compute_exact(const Instance& inst, const ServiceConfig& x, const ExactResult& r) {
  if (!r.defined)
    throw error("exact observables undefined: no NE at this realization");
  ObservableSet o;
  o.source = Source::kExact;
  o.W = r.W;
  o.N = r.N;
  o.Osat = r.Osat;
  o.energy = config_energy(inst, x);
  o.F = r.Osat - inst.omega * r.n_disc_present - inst.alpha * o.energy;
  return o;
}

ObservableSet compute_exact(const Instance& inst, const ServiceConfig& x, const AveragedResult& r,
                            Source source) {
  if (!r.defined)
    throw error("averaged observables undefined: every realization had zero NEs");
  ObservableSet o;
  o.source = source;
  o.W = r.W;
  o.N = r.N;
  o.Osat = r.Osat;
  o.energy = config_energy(inst, x);
  o.F = r.Osat - inst.omega * r.n_disc_present - inst.alpha * o.energy;
  return o;
}

}  // namespace nebp
