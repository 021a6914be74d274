#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "nebp/common.hpp"

namespace nebp {

// Probability triple over the edge label y, indexed [y + 1]:
// [0] -> y = -1, [1] -> y = 0, [2] -> y = 1.
using Triple = std::array<double, 3>;
// Probability pair over the presence value t, indexed [t].
using Pair = std::array<double, 2>;

inline int yi(int y) { return y + 1; }

// Cheap error-location tag; only formatted when a degeneracy is thrown.
struct FactorLoc {
  const char* kind = "factor";
  int id = -1;
  std::string str() const { return std::string(kind) + " " + std::to_string(id); }
};

struct UserFactorResult {
  std::vector<Triple> mu_hat;  // one normalized message per neighbor, input order
  Pair nu_hat{};               // normalized
  // Unnormalized factor traces on a common scale: total weight of the
  // configurations allowed at each t, and the weight of the all-(-1)
  // configuration (identical in both sectors).
  double sector[2] = {0.0, 0.0};
  double all_minus = 0.0;
};

struct UserFactorScratch {
  std::vector<double> a, b, one, pre_a, suf_a, pre_b, suf_b, env, sel_any, sel_geq, gpre, gsuf;
  std::vector<int> better;  // per neighbor l: 1 where w_l > w_j for the current candidate j
};

// Marginalizes the user-side constraint: at t=0 every label lies in {-1,0};
// at t=1 either all labels are -1 or exactly one neighbor is used, every
// strictly better neighbor is -1, and the rest are free in {-1,0}.
// Neighbors may come in any order; ties in w_us are honored non-strictly.
void user_factor_messages(std::span<const int> w_us, std::span<const Triple> mu_in,
                          const Pair& nu, UserFactorResult& out, UserFactorScratch& scratch,
                          FactorLoc loc);

UserFactorResult user_factor_messages(std::span<const int> w_us, std::span<const Triple> mu_in,
                                      const Pair& nu, FactorLoc loc = {});

struct UnitFactorScratch {
  std::vector<double> pre;   // (d+1) x (cap+1) prefix knapsack table
  std::vector<double> suf;   // (d+1) x (cap+1) suffix knapsack table
  std::vector<double> fout;  // per-neighbor out-factor at the current target load
};

// Marginalizes the unit-side constraint: the used set must fit within the
// capacity, and every unused neighbor is -1 exactly when adding it would
// overflow (or the unit is off), else 0. One knapsack pass per target final
// load, O(d * cap^2) for the whole message batch.
void unit_factor_messages(bool on, int capacity, std::span<const int> w_su,
                          std::span<const Triple> mu_hat_in, std::vector<Triple>& mu_out,
                          UnitFactorScratch& scratch, FactorLoc loc);

std::vector<Triple> unit_factor_messages(bool on, int capacity, std::span<const int> w_su,
                                         std::span<const Triple> mu_hat_in, FactorLoc loc = {});

// nu(t) proportional to P(t) / max(nu_hat(t), floor). Sets *floored when the
// guard changed a component that carries probability mass.
Pair nu_update(const Pair& nu_hat, double p_present, double floor, bool* floored);

}  // namespace nebp
