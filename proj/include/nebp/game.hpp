#pragma once

#include <cstdint>
#include <optional>

#include "nebp/instance.hpp"

namespace nebp {

// Activation vector x over units.
struct ServiceConfig {
  std::vector<uint8_t> on;

  static ServiceConfig all_on(const Instance& inst) {
    return {std::vector<uint8_t>(inst.n_units, 1)};
  }
  static ServiceConfig all_off(const Instance& inst) {
    return {std::vector<uint8_t>(inst.n_units, 0)};
  }
  int count_on() const {
    int n = 0;
    for (uint8_t b : on) n += b;
    return n;
  }
  std::string bitmask() const {
    std::string s(on.size(), '0');
    for (size_t i = 0; i < on.size(); ++i) s[i] = on[i] ? '1' : '0';
    return s;
  }
  bool operator==(const ServiceConfig&) const = default;
};

// Presence realization t over users.
struct PresencePattern {
  std::vector<uint8_t> present;

  static PresencePattern all_present(const Instance& inst) {
    return {std::vector<uint8_t>(inst.n_users, 1)};
  }
  bool operator==(const PresencePattern&) const = default;
};

// z_u: chosen unit per user, or kNone.
struct StrategyProfile {
  std::vector<UnitId> choice;
  bool operator==(const StrategyProfile&) const = default;
};

// Three-state edge labels: -1 unit inactive/saturated for u, 0 available but
// unused, 1 used by u. Indexed by edge id.
struct EdgeAssignment {
  std::vector<int8_t> label;
  bool operator==(const EdgeAssignment&) const = default;
};

// Payoff of user u under (x, t, z), Eq.-style semantics: w_us when connected
// and the unit accommodates the load, -omega when present and disconnected,
// 0 when absent and disconnected, -infinity for infeasible choices.
double payoff(const Instance& inst, const ServiceConfig& x, const PresencePattern& t,
              const StrategyProfile& z, UserId u);

// True iff every present user plays a best response against the others.
bool is_nash(const Instance& inst, const ServiceConfig& x, const PresencePattern& t,
             const StrategyProfile& z);

// Edge labels induced by a capacity-feasible profile: the used edge is 1,
// every other edge is -1 exactly when the unit is off or cannot take the
// user on top of its current load, else 0. Throws on infeasible profiles.
EdgeAssignment z_to_y(const Instance& inst, const ServiceConfig& x, const PresencePattern& t,
                      const StrategyProfile& z);

// The edge-variable characterization of the NE set: single choice per
// present user, capacities respected, no strictly better available unit
// ignored, -1/0 labels consistent with availability, and present users
// connect whenever something is available.
bool check_edge_constraints(const Instance& inst, const ServiceConfig& x,
                            const PresencePattern& t, const EdgeAssignment& y);

// Asynchronous best-response sweeps in seeded random order from the all-NONE
// profile. Returns nullopt if no fixed point is reached in max_steps sweeps.
std::optional<StrategyProfile> best_response_dynamics(const Instance& inst,
                                                      const ServiceConfig& x,
                                                      const PresencePattern& t, uint64_t seed,
                                                      int max_steps);

}  // namespace nebp
