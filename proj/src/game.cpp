#include "nebp/game.hpp"

#include <limits>
#include <numeric>

namespace nebp {

namespace {

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

// Load on each unit induced by z.
std::vector<long long> unit_loads(const Instance& inst, const StrategyProfile& z) {
  std::vector<long long> load(inst.n_units, 0);
  for (UserId u = 0; u < inst.n_users; ++u) {
    UnitId s = z.choice[u];
    if (s == kNone) continue;
    for (EdgeId e : inst.user_edges[u])
      if (inst.edges[e].s == s) load[s] += inst.edges[e].w_su;
  }
  return load;
}

const Edge* find_edge(const Instance& inst, UserId u, UnitId s) {
  for (EdgeId e : inst.user_edges[u])
    if (inst.edges[e].s == s) return &inst.edges[e];
  return nullptr;
}

}  // namespace

double payoff(const Instance& inst, const ServiceConfig& x, const PresencePattern& t,
              const StrategyProfile& z, UserId u) {
  UnitId s = z.choice[u];
  if (s == kNone) return t.present[u] ? -inst.omega : 0.0;
  const Edge* e = find_edge(inst, u, s);
  if (e == nullptr) throw param_error("payoff: z_u not in S_u for user " + std::to_string(u));
  if (!t.present[u]) return kMinusInf;  // absent users can only play NONE
  if (!x.on[s]) return kMinusInf;
  long long load = 0;
  for (EdgeId ue : inst.unit_edges[s]) {
    UserId v = inst.edges[ue].u;
    if (v != u && z.choice[v] == s) load += inst.edges[ue].w_su;
  }
  return load + e->w_su <= inst.capacity[s] ? static_cast<double>(e->w_us) : kMinusInf;
}

bool is_nash(const Instance& inst, const ServiceConfig& x, const PresencePattern& t,
             const StrategyProfile& z) {
  auto load = unit_loads(inst, z);
  for (UserId u = 0; u < inst.n_users; ++u) {
    if (!t.present[u]) {
      if (z.choice[u] != kNone) return false;  // only feasible action is NONE
      continue;
    }
    UnitId cur = z.choice[u];
    double cur_pay;
    if (cur == kNone) {
      cur_pay = -inst.omega;
    } else {
      const Edge* e = find_edge(inst, u, cur);
      if (e == nullptr)
        throw param_error("is_nash: z_u not in S_u for user " + std::to_string(u));
      cur_pay = (x.on[cur] && load[cur] <= inst.capacity[cur]) ? static_cast<double>(e->w_us)
                                                               : kMinusInf;
    }
    if (cur_pay < -inst.omega) return false;  // deviating to NONE improves
    for (EdgeId e : inst.user_edges[u]) {
      const Edge& ed = inst.edges[e];
      if (ed.s == cur) continue;
      // Load the unit would face if u moved there.
      long long would = load[ed.s] + ed.w_su;
      bool available = x.on[ed.s] && would <= inst.capacity[ed.s];
      if (available && static_cast<double>(ed.w_us) > cur_pay) return false;
    }
  }
  return true;
}

EdgeAssignment z_to_y(const Instance& inst, const ServiceConfig& x, const PresencePattern& t,
                      const StrategyProfile& z) {
  auto load = unit_loads(inst, z);
  for (UnitId s = 0; s < inst.n_units; ++s) {
    long long cap = x.on[s] ? inst.capacity[s] : 0;
    if (load[s] > cap)
      throw param_error("z_to_y: profile violates capacity of unit " + std::to_string(s));
  }
  for (UserId u = 0; u < inst.n_users; ++u)
    if (!t.present[u] && z.choice[u] != kNone)
      throw param_error("z_to_y: absent user " + std::to_string(u) + " is connected");

  EdgeAssignment y;
  y.label.resize(inst.num_edges());
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edges[e];
    if (z.choice[ed.u] == ed.s) {
      y.label[e] = 1;
    } else if (!x.on[ed.s] || load[ed.s] + ed.w_su > inst.capacity[ed.s]) {
      y.label[e] = -1;
    } else {
      y.label[e] = 0;
    }
  }
  return y;
}

bool check_edge_constraints(const Instance& inst, const ServiceConfig& x,
                            const PresencePattern& t, const EdgeAssignment& y) {
  // C2 + C4 ingredients: per-unit connected load.
  std::vector<long long> load(inst.n_units, 0);
  for (EdgeId e = 0; e < inst.num_edges(); ++e)
    if (y.label[e] == 1) load[inst.edges[e].s] += inst.edges[e].w_su;

  for (UnitId s = 0; s < inst.n_units; ++s) {
    long long cap = x.on[s] ? inst.capacity[s] : 0;
    if (load[s] > cap) return false;  // C2
  }
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edges[e];
    if (y.label[e] == 1) continue;
    // C4: -1 exactly when off or saturated for this user.
    bool unavailable = !x.on[ed.s] || load[ed.s] + ed.w_su > inst.capacity[ed.s];
    if ((y.label[e] == -1) != unavailable) return false;
  }
  for (UserId u = 0; u < inst.n_users; ++u) {
    int used = 0;
    int zeros = 0;
    int used_w = 0;
    for (EdgeId e : inst.user_edges[u]) {
      if (y.label[e] == 1) {
        ++used;
        used_w = inst.edges[e].w_us;
      } else if (y.label[e] == 0) {
        ++zeros;
      }
    }
    if (used > (t.present[u] ? 1 : 0)) return false;  // C1
    if (t.present[u] && zeros > 0 && used != 1) return false;  // C5
    if (used == 1) {
      for (EdgeId e : inst.user_edges[u])
        if (y.label[e] == 0 && inst.edges[e].w_us > used_w) return false;  // C3
    }
  }
  return true;
}

std::optional<StrategyProfile> best_response_dynamics(const Instance& inst,
                                                      const ServiceConfig& x,
                                                      const PresencePattern& t, uint64_t seed,
                                                      int max_steps) {
  if (max_steps < 1) throw param_error("best_response_dynamics: max_steps must be >= 1");
  StrategyProfile z{std::vector<UnitId>(inst.n_users, kNone)};
  std::vector<long long> load(inst.n_units, 0);
  std::vector<UserId> order;
  for (UserId u = 0; u < inst.n_users; ++u)
    if (t.present[u]) order.push_back(u);
  if (order.empty()) return z;

  Rng rng(seed);
  for (int sweep = 0; sweep < max_steps; ++sweep) {
    deterministic_shuffle(order, rng);
    bool changed = false;
    for (UserId u : order) {
      UnitId cur = z.choice[u];
      double best_pay = -inst.omega;
      UnitId best = kNone;
      for (EdgeId e : inst.user_edges[u]) {  // sorted by w_us desc, id asc
        const Edge& ed = inst.edges[e];
        long long occupied = load[ed.s] - (cur == ed.s ? ed.w_su : 0);
        if (!x.on[ed.s] || occupied + ed.w_su > inst.capacity[ed.s]) continue;
        if (static_cast<double>(ed.w_us) > best_pay) {
          best_pay = ed.w_us;
          best = ed.s;
        }
      }
      // Prefer the current action among equal-payoff best responses.
      if (cur != best && cur != kNone) {
        const Edge* e = find_edge(inst, u, cur);
        if (x.on[cur] && load[cur] <= inst.capacity[cur] &&
            static_cast<double>(e->w_us) >= best_pay)
          best = cur;
      }
      if (best != cur) {
        if (cur != kNone) load[cur] -= find_edge(inst, u, cur)->w_su;
        if (best != kNone) load[best] += find_edge(inst, u, best)->w_su;
        z.choice[u] = best;
        changed = true;
      }
    }
    if (!changed) return z;
  }
  return std::nullopt;
}

}  // namespace nebp
