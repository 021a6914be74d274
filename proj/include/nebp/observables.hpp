#pragma once

#include "nebp/bp.hpp"
#include "nebp/enumerate.hpp"

namespace nebp {

enum class Source { kMirrorBP, kFixedTBP, kExact, kSampled };

const char* source_name(Source s);

struct ObservableSet {
  double W = 0.0;       // expected connected workload
  double N = 0.0;       // expected count of fully cut-off users
  double Osat = 0.0;    // expected connected satisfaction
  double F = 0.0;       // Osat - omega * E[present & disconnected] - alpha * energy
  double energy = 0.0;  // sum of unit costs over active units
  Source source = Source::kExact;
  bool converged = true;
};

ObservableSet compute_from_marginals(const Instance& inst, const ServiceConfig& x,
                                     const Marginals& marginals, Source source, bool converged);

ObservableSet compute_exact(const Instance& inst, const ServiceConfig& x, const ExactResult& r);

ObservableSet compute_exact(const Instance& inst, const ServiceConfig& x, const AveragedResult& r,
                            Source source = Source::kSampled);

}  // namespace nebp
