#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "nebp/instance.hpp"

using namespace nebp;

namespace {

GeneratorParams s1_params(uint64_t seed) {
  return {12, 4, 2, 5, 10, 10.0, 0.0, seed};
}

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("generated S1-style instance is well formed") {
  Instance inst = generate_instance(s1_params(7));
  CHECK(validate(inst).empty());
  CHECK(inst.n_users == 12);
  CHECK(inst.n_units == 4);
  CHECK(inst.num_edges() == 12 * 2);
  int max_w_su = 0;
  for (const Edge& e : inst.edges) {
    CHECK(e.w_su >= 1);
    CHECK(e.w_su <= 10);
    CHECK(e.w_us == 10 - e.w_su);
    max_w_su = std::max(max_w_su, e.w_su);
  }
  CHECK(max_w_su == 10);
  for (UserId u = 0; u < inst.n_users; ++u) CHECK(inst.user_degree(u) == 2);
  for (double p : inst.presence) {
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
  }
  for (UnitId s = 0; s < inst.n_units; ++s) {
    CHECK(inst.capacity[s] == 5);
    CHECK(inst.cost[s] == 1.0);
  }
}

TEST_CASE("generator invariants hold across a parameter sweep") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorParams p{3 + static_cast<int>(seed % 10), 2 + static_cast<int>(seed % 5),
                      1 + static_cast<int>(seed % 2), 4, 8, 5.0, 0.5, seed};
    Instance inst = generate_instance(p);
    CHECK(validate(inst).empty());
    CHECK(inst.num_edges() == p.n_users * p.k);
    int max_w = 0;
    for (const Edge& e : inst.edges) max_w = std::max(max_w, e.w_su);
    CHECK(max_w == p.w_max);
  }
}

TEST_CASE("single user single unit takes the maximal weight edge") {
  Instance inst = generate_instance({1, 1, 1, 5, 10, 10.0, 0.0, 3});
  REQUIRE(inst.num_edges() == 1);
  CHECK(inst.edges[0].w_su == 10);
  CHECK(inst.edges[0].w_us == 0);
}

TEST_CASE("same seed gives a bit-identical instance") {
  Instance a = generate_instance(s1_params(42));
  Instance b = generate_instance(s1_params(42));
  CHECK(a.same_data(b));
  CHECK(to_json_string(a) == to_json_string(b));
  Instance c = generate_instance(s1_params(43));
  CHECK_FALSE(a.same_data(c));
}

TEST_CASE("parameter errors are rejected") {
  CHECK_THROWS_AS(generate_instance({4, 2, 3, 5, 10, 10.0, 0.0, 1}), param_error);  // k > n_units
  CHECK_THROWS_AS(generate_instance({0, 2, 1, 5, 10, 10.0, 0.0, 1}), param_error);
  CHECK_THROWS_AS(generate_instance({4, 2, 1, 0, 10, 10.0, 0.0, 1}), param_error);
}

TEST_CASE("validate points at broken fields") {
  Instance inst = generate_instance(s1_params(9));
  SUBCASE("zero presence") {
    inst.presence[3] = 0.0;
    auto v = validate(inst);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("presence[3]") != std::string::npos);
  }
  SUBCASE("isolated user") {
    std::erase_if(inst.edges, [](const Edge& e) { return e.u == 5; });
    inst.rebuild_adjacency();
    auto v = validate(inst);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("users[5]") != std::string::npos);
  }
  SUBCASE("weight out of range") {
    inst.edges[0].w_su = 0;
    auto v = validate(inst);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("w_su") != std::string::npos);
  }
}

TEST_CASE("save and load round-trips the instance") {
  Instance inst = generate_instance(s1_params(11));
  std::string path = tmp_path("nebp_roundtrip.json");
  save_instance(inst, path);
  Instance back = load_instance(path);
  CHECK(back.same_data(inst));
  CHECK(to_json_string(back) == to_json_string(inst));
  std::filesystem::remove(path);
}

TEST_CASE("parse errors name the offending key") {
  Instance inst = generate_instance({2, 2, 1, 5, 10, 10.0, 0.0, 5});
  std::string text = to_json_string(inst);

  SUBCASE("missing capacity") {
    auto pos = text.find("\"capacity\"");
    REQUIRE(pos != std::string::npos);
    auto end = text.find('\n', pos);
    std::string broken = text.substr(0, pos) + text.substr(end + 1);
    CHECK_THROWS_WITH_AS(from_json_string(broken), doctest::Contains("capacity"), parse_error);
  }
  SUBCASE("non-integer w_su") {
    auto pos = text.find("\"w_su\": ");
    REQUIRE(pos != std::string::npos);
    std::string broken = text;
    broken.insert(text.find_first_of("0123456789", pos + 7) + 1, ".5");
    CHECK_THROWS_AS(from_json_string(broken), parse_error);
  }
  SUBCASE("unknown key rejected") {
    std::string broken = text;
    broken.insert(broken.find("\"n_users\""), "\"surprise\": 1,\n  ");
    CHECK_THROWS_WITH_AS(from_json_string(broken), doctest::Contains("surprise"), parse_error);
  }
  SUBCASE("not json at all") {
    CHECK_THROWS_AS(from_json_string("garbage {"), parse_error);
  }
}

TEST_CASE("adjacency is sorted the way the solvers expect") {
  Instance inst = generate_instance(s1_params(13));
  for (UserId u = 0; u < inst.n_users; ++u) {
    const auto& list = inst.user_edges[u];
    for (size_t i = 1; i < list.size(); ++i) {
      const Edge& a = inst.edges[list[i - 1]];
      const Edge& b = inst.edges[list[i]];
      CHECK((a.w_us > b.w_us || (a.w_us == b.w_us && a.s < b.s)));
    }
  }
}
