#include "nebp/factors.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace nebp {

namespace {

Triple normalized(const Triple& t, FactorLoc loc) {
  double sum = t[0] + t[1] + t[2];
  if (!(sum > 0.0)) throw degeneracy_error("message normalized to zero at " + loc.str());
  return {t[0] / sum, t[1] / sum, t[2] / sum};
}

}  // namespace

void user_factor_messages(std::span<const int> w_us, std::span<const Triple> mu_in,
                          const Pair& nu, UserFactorResult& out, UserFactorScratch& sc,
                          FactorLoc loc) {
  const int d = static_cast<int>(w_us.size());
  assert(static_cast<int>(mu_in.size()) == d);
  out.mu_hat.resize(d);

  // a: neighbor forced unavailable; b: neighbor unavailable or unused;
  // one: neighbor used.
  sc.a.resize(d);
  sc.b.resize(d);
  sc.one.resize(d);
  for (int i = 0; i < d; ++i) {
    sc.a[i] = mu_in[i][yi(-1)];
    sc.b[i] = mu_in[i][yi(-1)] + mu_in[i][yi(0)];
    sc.one[i] = mu_in[i][yi(1)];
  }

  // Leave-one-out products of a and of b via prefix/suffix tables.
  sc.pre_a.assign(d + 1, 1.0);
  sc.suf_a.assign(d + 1, 1.0);
  sc.pre_b.assign(d + 1, 1.0);
  sc.suf_b.assign(d + 1, 1.0);
  for (int i = 0; i < d; ++i) {
    sc.pre_a[i + 1] = sc.pre_a[i] * sc.a[i];
    sc.pre_b[i + 1] = sc.pre_b[i] * sc.b[i];
  }
  for (int i = d - 1; i >= 0; --i) {
    sc.suf_a[i] = sc.suf_a[i + 1] * sc.a[i];
    sc.suf_b[i] = sc.suf_b[i + 1] * sc.b[i];
  }
  const double all_minus = sc.pre_a[d];
  const double all_free = sc.pre_b[d];

  // Selection terms: candidate j used, strictly better neighbors forced -1,
  // weakly worse ones free. env(j) excludes j itself; the pair products
  // exclude one more neighbor i and feed the cavity messages.
  double sel_full = 0.0;
  sc.env.resize(d);
  sc.sel_any.assign(d, 0.0);  // selections elsewhere, y_i = -1 allowed
  sc.sel_geq.assign(d, 0.0);  // selections at w_j >= w_i, y_i = 0 allowed
  sc.gpre.resize(d + 1);
  sc.gsuf.resize(d + 1);
  for (int j = 0; j < d; ++j) {
    sc.gpre[0] = 1.0;
    for (int l = 0; l < d; ++l) {
      double g = l == j ? 1.0 : (w_us[l] > w_us[j] ? sc.a[l] : sc.b[l]);
      sc.gpre[l + 1] = sc.gpre[l] * g;
    }
    sc.gsuf[d] = 1.0;
    for (int l = d - 1; l >= 0; --l) {
      double g = l == j ? 1.0 : (w_us[l] > w_us[j] ? sc.a[l] : sc.b[l]);
      sc.gsuf[l] = sc.gsuf[l + 1] * g;
    }
    sc.env[j] = sc.gpre[d];
    sel_full += sc.one[j] * sc.env[j];
    for (int i = 0; i < d; ++i) {
      if (i == j) continue;
      double pair = sc.one[j] * sc.gpre[i] * sc.gsuf[i + 1];
      sc.sel_any[i] += pair;
      if (w_us[j] >= w_us[i]) sc.sel_geq[i] += pair;
    }
  }

  for (int i = 0; i < d; ++i) {
    double allm_cav = sc.pre_a[i] * sc.suf_a[i + 1];
    double free_cav = sc.pre_b[i] * sc.suf_b[i + 1];
    // t = 1: all-(-1) or a selection; t = 0: labels free in {-1, 0}.
    Triple m = {nu[0] * free_cav + nu[1] * (allm_cav + sc.sel_any[i]),
                nu[0] * free_cav + nu[1] * sc.sel_geq[i],
                nu[1] * sc.env[i]};
    out.mu_hat[i] = normalized(m, loc);
  }

  out.sector[0] = all_free;
  out.sector[1] = all_minus + sel_full;
  out.all_minus = all_minus;
  double zn = out.sector[0] + out.sector[1];
  if (!(zn > 0.0)) throw degeneracy_error("nu_hat normalized to zero at " + loc.str());
  out.nu_hat = {out.sector[0] / zn, out.sector[1] / zn};
}

UserFactorResult user_factor_messages(std::span<const int> w_us, std::span<const Triple> mu_in,
                                      const Pair& nu, FactorLoc loc) {
  UserFactorResult out;
  UserFactorScratch sc;
  user_factor_messages(w_us, mu_in, nu, out, sc, loc);
  return out;
}

void unit_factor_messages(bool on, int capacity, std::span<const int> w_su,
                          std::span<const Triple> mu_hat_in, std::vector<Triple>& mu_out,
                          UnitFactorScratch& sc, FactorLoc loc) {
  const int d = static_cast<int>(w_su.size());
  assert(static_cast<int>(mu_hat_in.size()) == d);
  mu_out.assign(d, Triple{0.0, 0.0, 0.0});
  if (!on) {
    for (auto& m : mu_out) m = {1.0, 0.0, 0.0};
    return;
  }
  const int cap = capacity;
  const int width = cap + 1;
  sc.pre.assign(static_cast<size_t>(d + 1) * width, 0.0);
  sc.suf.assign(static_cast<size_t>(d + 1) * width, 0.0);
  sc.fout.resize(d);
  auto pre = [&](int i, int l) -> double& { return sc.pre[static_cast<size_t>(i) * width + l]; };
  auto suf = [&](int i, int l) -> double& { return sc.suf[static_cast<size_t>(i) * width + l]; };

  // One knapsack pass per target final load. Out-factors depend on the final
  // load: a bystander stays 0 while it would still fit on top, -1 otherwise.
  for (int target = 0; target <= cap; ++target) {
    for (int i = 0; i < d; ++i)
      sc.fout[i] = target + w_su[i] <= cap ? mu_hat_in[i][yi(0)] : mu_hat_in[i][yi(-1)];

    for (int l = 0; l <= target; ++l) pre(0, l) = l == 0 ? 1.0 : 0.0;
    for (int i = 0; i < d; ++i) {
      for (int l = 0; l <= target; ++l) {
        double v = pre(i, l) * sc.fout[i];
        if (l >= w_su[i]) v += pre(i, l - w_su[i]) * mu_hat_in[i][yi(1)];
        pre(i + 1, l) = v;
      }
    }
    for (int l = 0; l <= target; ++l) suf(d, l) = l == 0 ? 1.0 : 0.0;
    for (int i = d - 1; i >= 0; --i) {
      for (int l = 0; l <= target; ++l) {
        double v = suf(i + 1, l) * sc.fout[i];
        if (l >= w_su[i]) v += suf(i + 1, l - w_su[i]) * mu_hat_in[i][yi(1)];
        suf(i, l) = v;
      }
    }

    for (int i = 0; i < d; ++i) {
      // Coefficient of the cavity (everyone but i) at exact in-load l, with
      // out-factors evaluated at this target final load.
      auto cavity_at = [&](int l) {
        double sum = 0.0;
        for (int j = 0; j <= l; ++j) sum += pre(i, j) * suf(i + 1, l - j);
        return sum;
      };
      if (target >= w_su[i]) mu_out[i][yi(1)] += cavity_at(target - w_su[i]);
      if (target + w_su[i] <= cap)
        mu_out[i][yi(0)] += cavity_at(target);
      else
        mu_out[i][yi(-1)] += cavity_at(target);
    }
  }
  for (int i = 0; i < d; ++i) mu_out[i] = normalized(mu_out[i], loc);
}

std::vector<Triple> unit_factor_messages(bool on, int capacity, std::span<const int> w_su,
                                         std::span<const Triple> mu_hat_in, FactorLoc loc) {
  std::vector<Triple> out;
  UnitFactorScratch sc;
  unit_factor_messages(on, capacity, w_su, mu_hat_in, out, sc, loc);
  return out;
}

Pair nu_update(const Pair& nu_hat, double p_present, double floor, bool* floored) {
  Pair prior = {1.0 - p_present, p_present};
  Pair nu;
  bool hit = false;
  for (int t = 0; t < 2; ++t) {
    double denom = nu_hat[t];
    if (denom < floor) {
      denom = floor;
      if (prior[t] > 0.0) hit = true;
    }
    nu[t] = prior[t] / denom;
  }
  double sum = nu[0] + nu[1];
  if (!(sum > 0.0)) throw degeneracy_error("nu normalized to zero");
  if (floored != nullptr) *floored = hit;
  return {nu[0] / sum, nu[1] / sum};
}

}  // namespace nebp
