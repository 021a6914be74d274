#include "nebp/bp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nebp {

namespace {

class Engine {
 public:
  Engine(const Instance& inst, const ServiceConfig& x, const BPParams& params, bool mirror,
         const PresencePattern* t)
      : inst_(inst), x_(x), params_(params), mirror_(mirror) {
    const int ne = inst.num_edges();
    mu_.assign(ne, Triple{1.0 / 3, 1.0 / 3, 1.0 / 3});
    mu_hat_.assign(ne, Triple{1.0 / 3, 1.0 / 3, 1.0 / 3});
    nu_.resize(inst.n_users);
    for (UserId u = 0; u < inst.n_users; ++u) {
      if (mirror) {
        nu_[u] = {1.0 - inst.presence[u], inst.presence[u]};
      } else {
        int tu = t->present[u];
        nu_[u] = {tu ? 0.0 : 1.0, tu ? 1.0 : 0.0};
      }
    }
    nu_hat_.assign(inst.n_users, Pair{0.5, 0.5});

    user_w_.resize(inst.n_users);
    for (UserId u = 0; u < inst.n_users; ++u)
      for (EdgeId e : inst.user_edges[u]) user_w_[u].push_back(inst.edges[e].w_us);
    unit_w_.resize(inst.n_units);
    for (UnitId s = 0; s < inst.n_units; ++s)
      for (EdgeId e : inst.unit_edges[s]) unit_w_[s].push_back(inst.edges[e].w_su);

    unit_order_.resize(inst.n_units);
    std::iota(unit_order_.begin(), unit_order_.end(), 0);
    user_order_.resize(inst.n_users);
    std::iota(user_order_.begin(), user_order_.end(), 0);
  }

  BPRun run() {
    Rng rng(params_.seed);
    ConvergenceReport report;
    for (int iter = 1; iter <= params_.max_iters; ++iter) {
      double residual = 0.0;
      if (params_.schedule == BPParams::Schedule::kRandomPermutation) {
        deterministic_shuffle(unit_order_, rng);
        deterministic_shuffle(user_order_, rng);
      }
      for (UnitId s : unit_order_) {
        gather(inst_.unit_edges[s], mu_hat_);
        unit_factor_messages(x_.on[s] != 0, inst_.capacity[s], unit_w_[s], in_buf_, out_buf_,
                             unit_scratch_, {"unit", s});
        scatter_damped(inst_.unit_edges[s], out_buf_, mu_, residual);
      }
      for (UserId u : user_order_) {
        gather(inst_.user_edges[u], mu_);
        user_factor_messages(user_w_[u], in_buf_, nu_[u], user_out_, user_scratch_,
                             {"user", u});
        scatter_damped(inst_.user_edges[u], user_out_.mu_hat, mu_hat_, residual);
        nu_hat_[u] = user_out_.nu_hat;
      }
      if (mirror_) {
        for (UserId u = 0; u < inst_.n_users; ++u) {
          Pair fresh = nu_update(nu_hat_[u], inst_.presence[u], params_.floor, nullptr);
          for (int ti = 0; ti < 2; ++ti) {
            double nv = (1.0 - params_.damping) * fresh[ti] + params_.damping * nu_[u][ti];
            residual = std::max(residual, std::abs(nv - nu_[u][ti]));
            nu_[u][ti] = nv;
          }
        }
      }
      report.iterations = iter;
      report.residual = residual;
      if (residual < params_.tol) {
        report.converged = true;
        break;
      }
    }
    return {extract(report), report};
  }

 private:
  void gather(const std::vector<EdgeId>& edges, const std::vector<Triple>& from) {
    in_buf_.resize(edges.size());
    for (size_t i = 0; i < edges.size(); ++i) in_buf_[i] = from[edges[i]];
  }

  void scatter_damped(const std::vector<EdgeId>& edges, const std::vector<Triple>& computed,
                      std::vector<Triple>& into, double& residual) const {
    for (size_t i = 0; i < edges.size(); ++i) {
      Triple& old = into[edges[i]];
      for (int c = 0; c < 3; ++c) {
        double nv = (1.0 - params_.damping) * computed[i][c] + params_.damping * old[c];
        residual = std::max(residual, std::abs(nv - old[c]));
        old[c] = nv;
      }
    }
  }

  Marginals extract(ConvergenceReport& report) {
    Marginals m;
    m.edge.resize(inst_.num_edges());
    for (EdgeId e = 0; e < inst_.num_edges(); ++e) {
      Triple b;
      double sum = 0.0;
      for (int c = 0; c < 3; ++c) {
        b[c] = mu_[e][c] * mu_hat_[e][c];
        sum += b[c];
      }
      if (!(sum > 0.0))
        throw degeneracy_error("edge belief normalized to zero at edge " + std::to_string(e));
      for (int c = 0; c < 3; ++c) b[c] /= sum;
      m.edge[e] = b;
    }
    m.user_disconnected.resize(inst_.n_users);
    m.present_disconnected.resize(inst_.n_users);
    m.presence.resize(inst_.n_users);
    for (UserId u = 0; u < inst_.n_users; ++u) {
      gather(inst_.user_edges[u], mu_);
      user_factor_messages(user_w_[u], in_buf_, nu_[u], user_out_, user_scratch_, {"user", u});
      double z = nu_[u][0] * user_out_.sector[0] + nu_[u][1] * user_out_.sector[1];
      if (!(z > 0.0))
        throw degeneracy_error("user factor weight zero at user " + std::to_string(u));
      m.user_disconnected[u] = (nu_[u][0] + nu_[u][1]) * user_out_.all_minus / z;
      m.present_disconnected[u] = nu_[u][1] * user_out_.all_minus / z;
      m.presence[u] = {nu_[u][0] * user_out_.sector[0] / z,
                       nu_[u][1] * user_out_.sector[1] / z};
      if (mirror_) {
        bool floored = false;
        nu_update(user_out_.nu_hat, inst_.presence[u], params_.floor, &floored);
        if (floored) ++report.floored_users;
      }
    }
    return m;
  }

  const Instance& inst_;
  const ServiceConfig& x_;
  BPParams params_;
  bool mirror_;
  std::vector<Triple> mu_, mu_hat_;
  std::vector<Pair> nu_, nu_hat_;
  std::vector<std::vector<int>> user_w_, unit_w_;
  std::vector<UnitId> unit_order_;
  std::vector<UserId> user_order_;
  std::vector<Triple> in_buf_, out_buf_;
  UserFactorResult user_out_;
  UserFactorScratch user_scratch_;
  UnitFactorScratch unit_scratch_;
};

}  // namespace

BPRun run_fixed_t(const Instance& inst, const ServiceConfig& x, const PresencePattern& t,
                  const BPParams& params) {
  return Engine(inst, x, params, /*mirror=*/false, &t).run();
}

BPRun run_mirror(const Instance& inst, const ServiceConfig& x, const BPParams& params) {
  return Engine(inst, x, params, /*mirror=*/true, nullptr).run();
}

UserFactorResult user_factor_sweep(const Instance& inst, UserId u,
                                   std::span<const Triple> incoming_mu, const Pair& nu_u) {
  std::vector<int> w;
  for (EdgeId e : inst.user_edges[u]) w.push_back(inst.edges[e].w_us);
  return user_factor_messages(w, incoming_mu, nu_u, {"user", u});
}

std::vector<Triple> unit_factor_sweep(const Instance& inst, bool unit_on, UnitId s,
                                      std::span<const Triple> incoming_mu_hat) {
  std::vector<int> w;
  for (EdgeId e : inst.unit_edges[s]) w.push_back(inst.edges[e].w_su);
  return unit_factor_messages(unit_on, inst.capacity[s], w, incoming_mu_hat, {"unit", s});
}

}  // namespace nebp
