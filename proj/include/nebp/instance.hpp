#pragma once

#include <string>
#include <vector>

#include "nebp/common.hpp"

namespace nebp {

struct Edge {
  UserId u;
  UnitId s;
  int w_us;  // satisfaction of u when served by s
  int w_su;  // workload put on s by u
  bool operator==(const Edge&) const = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

// A service-provision problem: bipartite graph between users and service
// units, integer weights in both directions, unit capacities and energy
// costs, per-user presence probabilities, and the two objective parameters.
// Immutable after generation/loading; adjacency is derived and cached.
struct Instance {
  int n_users = 0;
  int n_units = 0;
  int w_max = 0;
  double omega = 0.0;  // penalty for a present, disconnected user
  double alpha = 0.0;  // energy/satisfaction trade-off

  std::vector<Edge> edges;          // sorted by (u, s)
  std::vector<int> capacity;        // c_s, per unit
  std::vector<double> cost;         // r_s, per unit
  std::vector<double> presence;     // p_u, per user
  std::vector<Point> user_pos;      // kept for reproducibility, unused by solvers
  std::vector<Point> unit_pos;

  // Derived adjacency. user_edges[u] is sorted by w_us descending (unit id
  // ascending among ties); unit_edges[s] is sorted by user id.
  std::vector<std::vector<EdgeId>> user_edges;
  std::vector<std::vector<EdgeId>> unit_edges;

  void rebuild_adjacency();

  int user_degree(UserId u) const { return static_cast<int>(user_edges[u].size()); }
  int unit_degree(UnitId s) const { return static_cast<int>(unit_edges[s].size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  bool same_data(const Instance& o) const {
    return n_users == o.n_users && n_units == o.n_units && w_max == o.w_max &&
           omega == o.omega && alpha == o.alpha && edges == o.edges &&
           capacity == o.capacity && cost == o.cost && presence == o.presence &&
           user_pos == o.user_pos && unit_pos == o.unit_pos;
  }
};

struct GeneratorParams {
  int n_users = 0;
  int n_units = 0;
  int k = 0;            // nearest units accessible per user
  int c_uniform = 0;    // capacity of every unit
  int w_max = 0;
  double omega = 0.0;
  double alpha = 0.0;
  uint64_t seed = 0;
};

// Places users and units uniformly at random in the unit square, connects
// each user to its k nearest units, and derives integer weights from squared
// distances so that the largest workload equals w_max. Same seed, same
// instance, bit for bit.
Instance generate_instance(const GeneratorParams& params);

// Empty result means all invariants hold. Each entry names the offending
// field and index.
std::vector<std::string> validate(const Instance& inst);

std::string to_json_string(const Instance& inst);
Instance from_json_string(const std::string& text);

void save_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path);

inline uint64_t instance_hash(const Instance& inst) { return fnv1a64(to_json_string(inst)); }

}  // namespace nebp
