#include "nebp/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nebp {

namespace {

// Depth-first search over the choices of present users. A choice survives
// only if no strictly better unit can still end up available: availability
// is monotone (loads only grow), so a unit whose remaining potential load
// cannot saturate it is decided early.
class NashSearch {
 public:
  NashSearch(const Instance& inst, const ServiceConfig& x, const PresencePattern& t,
             const std::vector<UserId>& order,
             const std::function<void(const EdgeAssignment&)>& yield, const EnumLimits& limits)
      : inst_(inst), x_(x), t_(t), yield_(yield), limits_(limits) {
    for (UserId u : order)
      if (t.present[u]) present_.push_back(u);
    load_.assign(inst.n_units, 0);
    // potential_[s]: total workload the not-yet-assigned users could still
    // put on s. Decreases as the search assigns users.
    potential_.assign(inst.n_units, 0);
    for (UserId u : present_)
      for (EdgeId e : inst.user_edges[u]) potential_[inst.edges[e].s] += inst.edges[e].w_su;
    choice_.assign(inst.n_users, kNone);
  }

  long long run() {
    descend(0);
    return count_;
  }

 private:
  bool available(UnitId s, int w_su) const {
    return x_.on[s] && load_[s] + w_su <= inst_.capacity[s];
  }

  // True if s is available for this edge weight and will stay so no matter
  // what the remaining users do.
  bool permanently_available(UnitId s, int w_su) const {
    return x_.on[s] && load_[s] + potential_[s] + w_su <= inst_.capacity[s];
  }

  void spend_node() {
    if (++nodes_ > limits_.node_budget)
      throw resource_error("NE enumeration exceeded node budget of " +
                           std::to_string(limits_.node_budget) + " explored nodes");
  }

  void descend(size_t depth) {
    if (depth == present_.size()) {
      if (verify_leaf()) {
        ++count_;
        if (yield_) yield_(z_to_y(inst_, x_, t_, {choice_}));
      }
      return;
    }
    UserId u = present_[depth];
    for (EdgeId e : inst_.user_edges[u]) potential_[inst_.edges[e].s] -= inst_.edges[e].w_su;

    for (EdgeId e : inst_.user_edges[u]) {
      const Edge& ed = inst_.edges[e];
      if (!available(ed.s, ed.w_su)) continue;
      spend_node();
      if (beaten_for_sure(u, ed.w_us)) continue;
      choice_[u] = ed.s;
      load_[ed.s] += ed.w_su;
      descend(depth + 1);
      load_[ed.s] -= ed.w_su;
    }
    spend_node();
    choice_[u] = kNone;
    if (!beaten_for_sure(u, -1)) descend(depth + 1);

    for (EdgeId e : inst_.user_edges[u]) potential_[inst_.edges[e].s] += inst_.edges[e].w_su;
  }

  // A strictly better unit that is guaranteed to stay available kills the
  // branch. w_cur = -1 stands for the NONE choice.
  bool beaten_for_sure(UserId u, int w_cur) const {
    for (EdgeId e : inst_.user_edges[u]) {
      const Edge& ed = inst_.edges[e];
      if (ed.w_us <= w_cur) break;  // user_edges sorted by w_us descending
      if (permanently_available(ed.s, ed.w_su)) return true;
    }
    return false;
  }

  // Final loads are known here; check every present user's best-response
  // condition exactly.
  bool verify_leaf() const {
    for (UserId u : present_) {
      int w_cur = -1;
      if (choice_[u] != kNone) {
        for (EdgeId e : inst_.user_edges[u])
          if (inst_.edges[e].s == choice_[u]) w_cur = inst_.edges[e].w_us;
      }
      for (EdgeId e : inst_.user_edges[u]) {
        const Edge& ed = inst_.edges[e];
        if (ed.w_us <= w_cur) break;
        if (ed.s != choice_[u] && available(ed.s, ed.w_su)) return false;
      }
    }
    return true;
  }

  const Instance& inst_;
  const ServiceConfig& x_;
  const PresencePattern& t_;
  const std::function<void(const EdgeAssignment&)>& yield_;
  const EnumLimits& limits_;
  std::vector<UserId> present_;
  std::vector<long long> load_, potential_;
  std::vector<UnitId> choice_;
  long long count_ = 0;
  long long nodes_ = 0;
};

ExactResult accumulate_exact(const Instance& inst, const ServiceConfig& x,
                             const PresencePattern& t, const EnumLimits& limits) {
  long double w_sum = 0, n_sum = 0, osat_sum = 0, ndp_sum = 0;
  auto tally = [&](const EdgeAssignment& y) {
    long long w = 0, osat = 0;
    for (EdgeId e = 0; e < inst.num_edges(); ++e) {
      if (y.label[e] == 1) {
        w += inst.edges[e].w_su;
        osat += inst.edges[e].w_us;
      }
    }
    int disc = 0, disc_present = 0;
    for (UserId u = 0; u < inst.n_users; ++u) {
      bool all_minus = true;
      for (EdgeId e : inst.user_edges[u])
        if (y.label[e] != -1) all_minus = false;
      if (all_minus) {
        ++disc;
        if (t.present[u]) ++disc_present;
      }
    }
    w_sum += w;
    osat_sum += osat;
    n_sum += disc;
    ndp_sum += disc_present;
  };
  ExactResult res;
  res.Z = enumerate_nash(inst, x, t, tally, limits);
  if (res.Z > 0) {
    res.defined = true;
    res.W = static_cast<double>(w_sum / res.Z);
    res.N = static_cast<double>(n_sum / res.Z);
    res.Osat = static_cast<double>(osat_sum / res.Z);
    res.n_disc_present = static_cast<double>(ndp_sum / res.Z);
  }
  return res;
}

}  // namespace

long long enumerate_nash(const Instance& inst, const ServiceConfig& x, const PresencePattern& t,
                         const std::function<void(const EdgeAssignment&)>& yield,
                         const EnumLimits& limits) {
  std::vector<UserId> order(inst.n_users);
  std::iota(order.begin(), order.end(), 0);
  return enumerate_nash(inst, x, t, yield, order, limits);
}

long long enumerate_nash(const Instance& inst, const ServiceConfig& x, const PresencePattern& t,
                         const std::function<void(const EdgeAssignment&)>& yield,
                         const std::vector<UserId>& user_order, const EnumLimits& limits) {
  return NashSearch(inst, x, t, user_order, yield, limits).run();
}

ExactResult exact_observables(const Instance& inst, const ServiceConfig& x,
                              const PresencePattern& t, const EnumLimits& limits) {
  return accumulate_exact(inst, x, t, limits);
}

AveragedResult sampled_average(const Instance& inst, const ServiceConfig& x, int sample_size,
                               uint64_t seed, const EnumLimits& limits, int workers) {
  if (sample_size < 1) throw param_error("sampled_average: sample_size must be >= 1");
  Rng rng(seed);
  std::vector<PresencePattern> patterns(sample_size);
  for (auto& t : patterns) {
    t.present.resize(inst.n_users);
    for (UserId u = 0; u < inst.n_users; ++u)
      t.present[u] = uniform01(rng) < inst.presence[u] ? 1 : 0;
  }
  std::vector<ExactResult> per(sample_size);
  parallel_for(sample_size, workers,
               [&](size_t i) { per[i] = exact_observables(inst, x, patterns[i], limits); });

  AveragedResult out;
  out.samples_total = sample_size;
  long double w = 0, n = 0, osat = 0, ndp = 0, w2 = 0, n2 = 0, osat2 = 0;
  for (const ExactResult& r : per) {
    if (!r.defined) {
      ++out.zero_ne;
      continue;
    }
    ++out.samples_used;
    w += r.W;
    n += r.N;
    osat += r.Osat;
    ndp += r.n_disc_present;
    w2 += r.W * r.W;
    n2 += r.N * r.N;
    osat2 += r.Osat * r.Osat;
  }
  if (out.samples_used == 0) return out;
  long long m = out.samples_used;
  out.defined = true;
  out.W = static_cast<double>(w / m);
  out.N = static_cast<double>(n / m);
  out.Osat = static_cast<double>(osat / m);
  out.n_disc_present = static_cast<double>(ndp / m);
  if (m > 1) {
    auto se = [m](long double sum, long double sum2) {
      long double var = (sum2 - sum * sum / m) / (m - 1);
      return var > 0 ? std::sqrt(static_cast<double>(var) / m) : 0.0;
    };
    out.W_se = se(w, w2);
    out.N_se = se(n, n2);
    out.Osat_se = se(osat, osat2);
  }
  return out;
}

AveragedResult exact_average(const Instance& inst, const ServiceConfig& x,
                             const EnumLimits& limits) {
  if (inst.n_users > 25)
    throw resource_error("exact_average: 2^" + std::to_string(inst.n_users) +
                         " presence patterns is out of reach");
  AveragedResult out;
  long double w = 0, n = 0, osat = 0, ndp = 0, mass = 0;
  PresencePattern t;
  t.present.resize(inst.n_users);
  const uint64_t total = 1ULL << inst.n_users;
  for (uint64_t mask = 0; mask < total; ++mask) {
    long double prob = 1.0;
    for (UserId u = 0; u < inst.n_users; ++u) {
      bool present = (mask >> u) & 1;
      t.present[u] = present;
      prob *= present ? inst.presence[u] : 1.0 - inst.presence[u];
    }
    ++out.samples_total;
    if (prob == 0.0) continue;
    ExactResult r = exact_observables(inst, x, t, limits);
    if (!r.defined) {
      ++out.zero_ne;
      continue;
    }
    ++out.samples_used;
    mass += prob;
    w += prob * r.W;
    n += prob * r.N;
    osat += prob * r.Osat;
    ndp += prob * r.n_disc_present;
  }
  if (mass <= 0) return out;
  out.defined = true;
  out.W = static_cast<double>(w / mass);
  out.N = static_cast<double>(n / mass);
  out.Osat = static_cast<double>(osat / mass);
  out.n_disc_present = static_cast<double>(ndp / mass);
  return out;
}

}  // namespace nebp
