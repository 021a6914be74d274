#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <limits>

#include "doctest.h"
#include "nebp/game.hpp"
#include "oracle.hpp"

using namespace nebp;
using namespace nebp::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One unit, two users, workloads 3 and 3, capacity 5: at most one connects.
Instance two_users_one_unit() {
  return make_instance(2, 1, {{0, 0, 7, 3}, {1, 0, 6, 3}}, {5});
}

}  // namespace

TEST_CASE("payoff follows the per-case definition") {
  Instance inst = make_instance(1, 1, {{0, 0, 7, 3}}, {5});
  ServiceConfig x = ServiceConfig::all_on(inst);
  PresencePattern t = PresencePattern::all_present(inst);

  CHECK(payoff(inst, x, t, {{0}}, 0) == 7.0);

  Instance tight = make_instance(1, 1, {{0, 0, 7, 3}}, {2});
  CHECK(payoff(tight, x, t, {{0}}, 0) == -kInf);

  CHECK(payoff(inst, x, t, {{kNone}}, 0) == -10.0);  // omega = 10

  PresencePattern absent{{0}};
  CHECK(payoff(inst, x, absent, {{kNone}}, 0) == 0.0);
  CHECK(payoff(inst, x, absent, {{0}}, 0) == -kInf);

  ServiceConfig x_off = ServiceConfig::all_off(inst);
  CHECK(payoff(inst, x_off, t, {{0}}, 0) == -kInf);

  Instance two = two_users_one_unit();
  PresencePattern both = PresencePattern::all_present(two);
  ServiceConfig on = ServiceConfig::all_on(two);
  // Unit saturates: 3 + 3 > 5.
  CHECK(payoff(two, on, both, {{0, 0}}, 0) == -kInf);
  CHECK(payoff(two, on, both, {{0, kNone}}, 0) == 7.0);

  CHECK_THROWS_AS(payoff(inst, x, t, {{3}}, 0), param_error);
}

TEST_CASE("is_nash on the two-user one-unit example") {
  Instance inst = two_users_one_unit();
  ServiceConfig x = ServiceConfig::all_on(inst);
  PresencePattern t = PresencePattern::all_present(inst);

  CHECK(is_nash(inst, x, t, {{0, kNone}}));
  CHECK(is_nash(inst, x, t, {{kNone, 0}}));
  CHECK_FALSE(is_nash(inst, x, t, {{kNone, kNone}}));

  PresencePattern second_absent{{1, 0}};
  CHECK(is_nash(inst, x, second_absent, {{0, kNone}}));
  CHECK_FALSE(is_nash(inst, x, second_absent, {{kNone, kNone}}));
}

TEST_CASE("is_nash is invariant under relabeling of identical users") {
  // Users 0 and 1 are exact copies; swapping their roles preserves the verdict.
  Instance inst = two_users_one_unit();
  inst.edges[1].w_us = 7;
  inst.rebuild_adjacency();
  ServiceConfig x = ServiceConfig::all_on(inst);
  PresencePattern t = PresencePattern::all_present(inst);
  CHECK(is_nash(inst, x, t, {{0, kNone}}) == is_nash(inst, x, t, {{kNone, 0}}));
}

TEST_CASE("z_to_y labels by availability") {
  Instance inst = two_users_one_unit();
  ServiceConfig x = ServiceConfig::all_on(inst);
  PresencePattern t = PresencePattern::all_present(inst);

  EdgeAssignment y = z_to_y(inst, x, t, {{0, kNone}});
  CHECK(y.label[0] == 1);
  CHECK(y.label[1] == -1);  // 3 + 3 > 5: saturated for user 1

  Instance single = make_instance(1, 1, {{0, 0, 7, 3}}, {5});
  EdgeAssignment ys = z_to_y(single, ServiceConfig::all_on(single),
                             PresencePattern::all_present(single), {{0}});
  CHECK(ys.label[0] == 1);

  EdgeAssignment yoff = z_to_y(inst, ServiceConfig::all_off(inst), t, {{kNone, kNone}});
  CHECK(yoff.label[0] == -1);
  CHECK(yoff.label[1] == -1);

  // Infeasible: both connected overflows the unit.
  CHECK_THROWS_AS(z_to_y(inst, x, t, {{0, 0}}), param_error);
}

TEST_CASE("check_edge_constraints accepts exactly the NE images") {
  Instance inst = two_users_one_unit();
  ServiceConfig x = ServiceConfig::all_on(inst);
  PresencePattern t = PresencePattern::all_present(inst);

  EdgeAssignment y = z_to_y(inst, x, t, {{0, kNone}});
  CHECK(check_edge_constraints(inst, x, t, y));

  // Flipping the -1 to 1 overflows the capacity (C2).
  EdgeAssignment y2 = y;
  y2.label[1] = 1;
  CHECK_FALSE(check_edge_constraints(inst, x, t, y2));

  // A present user facing an available unit must connect (C5).
  Instance single = make_instance(1, 1, {{0, 0, 7, 3}}, {5});
  EdgeAssignment all_zero{{0}};
  CHECK_FALSE(check_edge_constraints(single, ServiceConfig::all_on(single),
                                     PresencePattern::all_present(single), all_zero));

  // C4: a 0 label on an off unit is inconsistent.
  CHECK_FALSE(check_edge_constraints(single, ServiceConfig::all_off(single),
                                     PresencePattern::all_present(single), all_zero));
}

TEST_CASE("best response dynamics lands on a Nash equilibrium") {
  Instance single = make_instance(1, 1, {{0, 0, 7, 3}}, {5});
  auto z = best_response_dynamics(single, ServiceConfig::all_on(single),
                                  PresencePattern::all_present(single), 1, 100);
  REQUIRE(z.has_value());
  CHECK(z->choice[0] == 0);

  Instance two = two_users_one_unit();
  ServiceConfig x = ServiceConfig::all_on(two);
  PresencePattern t = PresencePattern::all_present(two);
  bool saw_first = false, saw_second = false;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto zz = best_response_dynamics(two, x, t, seed, 100);
    REQUIRE(zz.has_value());
    CHECK(is_nash(two, x, t, *zz));
    if (zz->choice[0] == 0) saw_first = true;
    if (zz->choice[1] == 0) saw_second = true;
  }
  CHECK(saw_first);
  CHECK(saw_second);

  auto off = best_response_dynamics(two, ServiceConfig::all_off(two), t, 5, 100);
  REQUIRE(off.has_value());
  CHECK(off->choice[0] == kNone);
  CHECK(off->choice[1] == kNone);
}

TEST_CASE("best response dynamics reaches a NE on random instances") {
  for (uint64_t seed = 1; seed <= 15; ++seed) {
    GeneratorParams p{10, 4, 2 + static_cast<int>(seed % 3), 6, 10, 10.0, 0.0, seed};
    Instance inst = generate_instance(p);
    ServiceConfig x = ServiceConfig::all_on(inst);
    Rng rng(seed * 17);
    PresencePattern t = random_pattern(inst, rng);
    auto z = best_response_dynamics(inst, x, t, seed, 500);
    REQUIRE(z.has_value());
    CHECK(is_nash(inst, x, t, *z));
  }
}

TEST_CASE("the z and y representations carry the same NE set") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    GeneratorParams p{7, 3, 2, 5, 8, 10.0, 0.0, seed};
    Instance inst = generate_instance(p);
    Rng rng(seed * 31);
    ServiceConfig x = ServiceConfig::all_on(inst);
    for (UnitId s = 0; s < inst.n_units; ++s) x.on[s] = uniform01(rng) < 0.75;
    PresencePattern t = random_pattern(inst, rng);

    long long z_count = count_nash_brute(inst, x, t);
    long long y_count = enumerate_nash(inst, x, t, [&](const EdgeAssignment& y) {
      CHECK(check_edge_constraints(inst, x, t, y));
    });
    CHECK(z_count == y_count);
  }
}
