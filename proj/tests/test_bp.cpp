#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "nebp/bp.hpp"
#include "oracle.hpp"

using namespace nebp;
using namespace nebp::testing;

namespace {

Instance two_users_one_unit() {
  return make_instance(2, 1, {{0, 0, 7, 3}, {1, 0, 6, 3}}, {5});
}

}  // namespace

TEST_CASE("fixed-t BP is exact on acyclic instances") {
  Rng rng(515);
  int compared = 0;
  for (int trial = 0; trial < 12; ++trial) {
    Instance inst = random_tree_instance(4 + trial, 8, 2, 10, rng);
    ServiceConfig x = ServiceConfig::all_on(inst);
    for (int pat = 0; pat < 4; ++pat) {
      PresencePattern t = pat == 0 ? PresencePattern::all_present(inst)
                                   : random_pattern(inst, rng);
      EnumMarginals exact = enum_marginals(inst, x, t);
      if (exact.Z == 0) continue;
      BPRun run = run_fixed_t(inst, x, t);
      REQUIRE(run.report.converged);
      ++compared;
      for (EdgeId e = 0; e < inst.num_edges(); ++e)
        CHECK(max_abs_diff(run.marginals.edge[e], exact.edge[e]) < 1e-6);
      for (UserId u = 0; u < inst.n_users; ++u)
        CHECK(std::abs(run.marginals.user_disconnected[u] - exact.user_disconnected[u]) < 1e-6);
    }
  }
  CHECK(compared > 20);
}

TEST_CASE("all units off forces the all-minus belief") {
  Instance inst = two_users_one_unit();
  BPRun run = run_fixed_t(inst, ServiceConfig::all_off(inst),
                          PresencePattern::all_present(inst));
  REQUIRE(run.report.converged);
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    CHECK(run.marginals.edge[e][yi(-1)] == doctest::Approx(1.0));
  }
  CHECK(run.marginals.user_disconnected[0] == doctest::Approx(1.0));
  CHECK(run.marginals.user_disconnected[1] == doctest::Approx(1.0));
}

TEST_CASE("two users one unit: belief splits over the two equilibria") {
  Instance inst = two_users_one_unit();
  BPRun run = run_fixed_t(inst, ServiceConfig::all_on(inst),
                          PresencePattern::all_present(inst));
  REQUIRE(run.report.converged);
  CHECK(run.marginals.edge[0][yi(1)] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(run.marginals.edge[1][yi(1)] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(run.marginals.user_disconnected[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(run.marginals.user_disconnected[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("single user and unit with partial presence") {
  Instance inst = make_instance(1, 1, {{0, 0, 7, 3}}, {5}, 10.0, 0.0, {0.3});
  BPRun run = run_mirror(inst, ServiceConfig::all_on(inst));
  REQUIRE(run.report.converged);
  CHECK(run.marginals.edge[0][yi(1)] == doctest::Approx(0.3).epsilon(1e-7));
  CHECK(run.marginals.edge[0][yi(0)] == doctest::Approx(0.7).epsilon(1e-7));
  CHECK(run.marginals.edge[0][yi(-1)] == doctest::Approx(0.0));
  CHECK(run.marginals.user_disconnected[0] == doctest::Approx(0.0));
}

TEST_CASE("mirror with certain presence equals frozen all-present BP") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    Instance inst = generate_instance({10, 4, 2, 5, 10, 10.0, 0.0, seed});
    for (double& p : inst.presence) p = 1.0;
    ServiceConfig x = ServiceConfig::all_on(inst);
    BPRun mirror = run_mirror(inst, x);
    BPRun fixed = run_fixed_t(inst, x, PresencePattern::all_present(inst));
    REQUIRE(mirror.report.converged);
    REQUIRE(fixed.report.converged);
    for (EdgeId e = 0; e < inst.num_edges(); ++e)
      CHECK(max_abs_diff(mirror.marginals.edge[e], fixed.marginals.edge[e]) < 1e-8);
    for (UserId u = 0; u < inst.n_users; ++u)
      CHECK(std::abs(mirror.marginals.user_disconnected[u] -
                     fixed.marginals.user_disconnected[u]) < 1e-8);
  }
}

TEST_CASE("the mirror fixed point reproduces the presence prior") {
  for (uint64_t seed = 11; seed <= 16; ++seed) {
    Instance inst = generate_instance({12, 4, 3, 6, 10, 10.0, 0.0, seed});
    BPParams params;
    BPRun run = run_mirror(inst, ServiceConfig::all_on(inst), params);
    REQUIRE(run.report.converged);
    CHECK(run.report.floored_users == 0);
    for (UserId u = 0; u < inst.n_users; ++u)
      CHECK(std::abs(run.marginals.presence[u][1] - inst.presence[u]) < 10 * params.tol);
  }
}

TEST_CASE("marginals stay normalized") {
  Instance inst = generate_instance({12, 4, 2, 5, 10, 10.0, 0.0, 321});
  BPRun run = run_mirror(inst, ServiceConfig::all_on(inst));
  for (const Triple& b : run.marginals.edge) {
    CHECK(b[0] + b[1] + b[2] == doctest::Approx(1.0));
    for (double v : b) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
    }
  }
  for (double v : run.marginals.user_disconnected) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-12);
  }
}

TEST_CASE("damping does not move the fixed point") {
  for (uint64_t seed = 7; seed <= 10; ++seed) {
    Instance inst = generate_instance({12, 6, 2, 6, 10, 10.0, 0.0, seed});
    ServiceConfig x = ServiceConfig::all_on(inst);
    BPParams d0;
    d0.damping = 0.0;
    BPParams d5;
    d5.damping = 0.5;
    BPRun a = run_mirror(inst, x, d0);
    BPRun b = run_mirror(inst, x, d5);
    if (!a.report.converged || !b.report.converged) continue;
    for (EdgeId e = 0; e < inst.num_edges(); ++e)
      CHECK(max_abs_diff(a.marginals.edge[e], b.marginals.edge[e]) < 1e-5);
  }
}

TEST_CASE("non-convergence is reported, marginals still delivered") {
  Instance inst = generate_instance({12, 4, 3, 6, 10, 10.0, 0.0, 5});
  BPParams params;
  params.max_iters = 1;
  BPRun run = run_mirror(inst, ServiceConfig::all_on(inst), params);
  CHECK_FALSE(run.report.converged);
  CHECK(run.report.iterations == 1);
  CHECK(run.report.residual >= params.tol);
  CHECK(run.marginals.edge.size() == static_cast<size_t>(inst.num_edges()));
}

TEST_CASE("schedule choice does not change the layered fixed point") {
  Instance inst = generate_instance({10, 4, 2, 5, 10, 10.0, 0.0, 88});
  BPParams seq;
  seq.schedule = BPParams::Schedule::kSequential;
  BPParams perm;
  perm.schedule = BPParams::Schedule::kRandomPermutation;
  perm.seed = 1234;
  BPRun a = run_mirror(inst, ServiceConfig::all_on(inst), seq);
  BPRun b = run_mirror(inst, ServiceConfig::all_on(inst), perm);
  REQUIRE(a.report.converged);
  REQUIRE(b.report.converged);
  for (EdgeId e = 0; e < inst.num_edges(); ++e)
    CHECK(max_abs_diff(a.marginals.edge[e], b.marginals.edge[e]) < 1e-6);
}

TEST_CASE("instance-level sweep wrappers agree with the brute force") {
  Instance inst = generate_instance({6, 3, 2, 5, 8, 10.0, 0.0, 55});
  Rng rng(99);

  UserId u = 2;
  int du = inst.user_degree(u);
  std::vector<Triple> mu_in(du);
  for (auto& m : mu_in) m = random_triple(rng);
  Pair nu{0.4, 0.6};
  UserFactorResult fast = user_factor_sweep(inst, u, mu_in, nu);
  std::vector<int> w;
  for (EdgeId e : inst.user_edges[u]) w.push_back(inst.edges[e].w_us);
  UserFactorResult brute = user_messages_brute(w, mu_in, nu);
  for (int i = 0; i < du; ++i) CHECK(max_abs_diff(fast.mu_hat[i], brute.mu_hat[i]) < 1e-12);

  UnitId s = 1;
  int ds = inst.unit_degree(s);
  std::vector<Triple> mu_hat_in(ds);
  for (auto& m : mu_hat_in) m = random_triple(rng);
  auto fast_u = unit_factor_sweep(inst, true, s, mu_hat_in);
  std::vector<int> ws;
  for (EdgeId e : inst.unit_edges[s]) ws.push_back(inst.edges[e].w_su);
  auto brute_u = unit_messages_brute(true, inst.capacity[s], ws, mu_hat_in);
  for (int i = 0; i < ds; ++i) CHECK(max_abs_diff(fast_u[i], brute_u[i]) < 1e-12);
}
