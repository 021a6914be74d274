#include "nebp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace nebp {

using ordered_json = nlohmann::ordered_json;

void Instance::rebuild_adjacency() {
  user_edges.assign(n_users, {});
  unit_edges.assign(n_units, {});
  for (EdgeId e = 0; e < num_edges(); ++e) {
    user_edges[edges[e].u].push_back(e);
    unit_edges[edges[e].s].push_back(e);
  }
  for (auto& list : user_edges) {
    std::sort(list.begin(), list.end(), [&](EdgeId a, EdgeId b) {
      if (edges[a].w_us != edges[b].w_us) return edges[a].w_us > edges[b].w_us;
      return edges[a].s < edges[b].s;
    });
  }
  for (auto& list : unit_edges) {
    std::sort(list.begin(), list.end(),
              [&](EdgeId a, EdgeId b) { return edges[a].u < edges[b].u; });
  }
}

Instance generate_instance(const GeneratorParams& params) {
  if (params.n_users < 1 || params.n_units < 1)
    throw param_error("generate_instance: n_users and n_units must be positive");
  if (params.k < 1 || params.k > params.n_units)
    throw param_error("generate_instance: need 1 <= k <= n_units");
  if (params.c_uniform < 1) throw param_error("generate_instance: capacity must be positive");
  if (params.w_max < 1) throw param_error("generate_instance: w_max must be positive");
  if (params.omega < 0 || params.alpha < 0)
    throw param_error("generate_instance: omega and alpha must be non-negative");

  Rng rng(params.seed);
  Instance inst;
  inst.n_users = params.n_users;
  inst.n_units = params.n_units;
  inst.w_max = params.w_max;
  inst.omega = params.omega;
  inst.alpha = params.alpha;

  inst.unit_pos.resize(params.n_units);
  for (auto& p : inst.unit_pos) {
    p.x = uniform01(rng);
    p.y = uniform01(rng);
  }
  inst.user_pos.resize(params.n_users);
  for (auto& p : inst.user_pos) {
    p.x = uniform01(rng);
    p.y = uniform01(rng);
  }
  inst.presence.resize(params.n_users);
  for (auto& p : inst.presence) p = 1.0 - uniform01(rng);  // lands in (0, 1]

  inst.capacity.assign(params.n_units, params.c_uniform);
  inst.cost.assign(params.n_units, 1.0);

  // k nearest units per user, ties broken by lower unit id.
  struct Cand {
    double d2;
    UnitId s;
  };
  std::vector<Cand> cands(params.n_units);
  std::vector<std::pair<std::pair<UserId, UnitId>, double>> chosen;
  chosen.reserve(static_cast<size_t>(params.n_users) * params.k);
  double max_d2 = 0.0;
  for (UserId u = 0; u < params.n_users; ++u) {
    for (UnitId s = 0; s < params.n_units; ++s) {
      double dx = inst.user_pos[u].x - inst.unit_pos[s].x;
      double dy = inst.user_pos[u].y - inst.unit_pos[s].y;
      cands[s] = {dx * dx + dy * dy, s};
    }
    std::partial_sort(cands.begin(), cands.begin() + params.k, cands.end(),
                      [](const Cand& a, const Cand& b) {
                        if (a.d2 != b.d2) return a.d2 < b.d2;
                        return a.s < b.s;
                      });
    for (int j = 0; j < params.k; ++j) {
      chosen.push_back({{u, cands[j].s}, cands[j].d2});
      max_d2 = std::max(max_d2, cands[j].d2);
    }
  }

  // gamma scales squared distances so the farthest chosen edge gets w_max.
  double gamma = max_d2 > 0.0 ? params.w_max / max_d2 : 0.0;
  inst.edges.reserve(chosen.size());
  for (const auto& [us, d2] : chosen) {
    int w_su = max_d2 > 0.0 ? static_cast<int>(std::ceil(gamma * d2)) : params.w_max;
    w_su = std::clamp(w_su, 1, params.w_max);
    inst.edges.push_back({us.first, us.second, params.w_max - w_su, w_su});
  }
  std::sort(inst.edges.begin(), inst.edges.end(), [](const Edge& a, const Edge& b) {
    if (a.u != b.u) return a.u < b.u;
    return a.s < b.s;
  });
  inst.rebuild_adjacency();
  return inst;
}

std::vector<std::string> validate(const Instance& inst) {
  std::vector<std::string> out;
  auto bad = [&](const std::string& msg) { out.push_back(msg); };

  if (inst.n_users < 0) bad("n_users: negative");
  if (inst.n_units < 0) bad("n_units: negative");
  if (inst.w_max < 1) bad("w_max: must be >= 1");
  if (inst.omega < 0) bad("omega: must be >= 0");
  if (inst.alpha < 0) bad("alpha: must be >= 0");
  if (static_cast<int>(inst.capacity.size()) != inst.n_units) bad("capacity: wrong length");
  if (static_cast<int>(inst.cost.size()) != inst.n_units) bad("cost: wrong length");
  if (static_cast<int>(inst.presence.size()) != inst.n_users) bad("presence: wrong length");

  for (size_t s = 0; s < inst.capacity.size(); ++s)
    if (inst.capacity[s] < 1) bad("capacity[" + std::to_string(s) + "]: must be >= 1");
  for (size_t s = 0; s < inst.cost.size(); ++s)
    if (inst.cost[s] < 0) bad("cost[" + std::to_string(s) + "]: must be >= 0");
  for (size_t u = 0; u < inst.presence.size(); ++u)
    if (!(inst.presence[u] > 0.0 && inst.presence[u] <= 1.0))
      bad("presence[" + std::to_string(u) + "]: must be in (0, 1]");

  std::set<std::pair<UserId, UnitId>> seen;
  std::vector<int> degree(std::max(inst.n_users, 0), 0);
  for (size_t e = 0; e < inst.edges.size(); ++e) {
    const Edge& ed = inst.edges[e];
    std::string tag = "edges[" + std::to_string(e) + "]";
    if (ed.u < 0 || ed.u >= inst.n_users) {
      bad(tag + ": user id out of range");
      continue;
    }
    if (ed.s < 0 || ed.s >= inst.n_units) {
      bad(tag + ": unit id out of range");
      continue;
    }
    if (!seen.insert({ed.u, ed.s}).second) bad(tag + ": duplicate edge");
    if (ed.w_su < 1 || ed.w_su > inst.w_max) bad(tag + ": w_su must be in [1, w_max]");
    if (ed.w_us < 0) bad(tag + ": w_us must be >= 0");
    ++degree[ed.u];
  }
  for (UserId u = 0; u < inst.n_users; ++u)
    if (degree[u] == 0) bad("users[" + std::to_string(u) + "]: no accessible unit");
  return out;
}

namespace {

void reject_unknown_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) throw parse_error("instance file: unknown key '" + it.key() + "' in " + where);
  }
}

const ordered_json& require(const ordered_json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw parse_error("instance file: missing key '" + std::string(key) + "' in " + where);
  return *it;
}

int require_int(const ordered_json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number_integer())
    throw parse_error("instance file: key '" + std::string(key) + "' in " + where +
                      " must be an integer");
  return v.get<int>();
}

double require_real(const ordered_json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number())
    throw parse_error("instance file: key '" + std::string(key) + "' in " + where +
                      " must be a number");
  return v.get<double>();
}

}  // namespace

std::string to_json_string(const Instance& inst) {
  ordered_json j;
  j["version"] = 1;
  j["n_users"] = inst.n_users;
  j["n_units"] = inst.n_units;
  j["omega"] = inst.omega;
  j["alpha"] = inst.alpha;
  j["w_max"] = inst.w_max;
  j["units"] = ordered_json::array();
  for (UnitId s = 0; s < inst.n_units; ++s) {
    ordered_json js;
    js["id"] = s;
    js["x"] = inst.unit_pos[s].x;
    js["y"] = inst.unit_pos[s].y;
    js["capacity"] = inst.capacity[s];
    js["cost"] = inst.cost[s];
    j["units"].push_back(std::move(js));
  }
  j["users"] = ordered_json::array();
  for (UserId u = 0; u < inst.n_users; ++u) {
    ordered_json ju;
    ju["id"] = u;
    ju["x"] = inst.user_pos[u].x;
    ju["y"] = inst.user_pos[u].y;
    ju["p"] = inst.presence[u];
    j["users"].push_back(std::move(ju));
  }
  j["edges"] = ordered_json::array();
  for (const Edge& e : inst.edges) {
    ordered_json je;
    je["u"] = e.u;
    je["s"] = e.s;
    je["w_us"] = e.w_us;
    je["w_su"] = e.w_su;
    j["edges"].push_back(std::move(je));
  }
  return j.dump(2) + "\n";
}

Instance from_json_string(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("instance file: ") + e.what());
  }
  if (!j.is_object()) throw parse_error("instance file: top level must be an object");
  reject_unknown_keys(
      j, {"version", "n_users", "n_units", "omega", "alpha", "w_max", "units", "users", "edges"},
      "top level");
  int version = require_int(j, "version", "top level");
  if (version != 1)
    throw parse_error("instance file: unsupported version " + std::to_string(version));

  Instance inst;
  inst.n_users = require_int(j, "n_users", "top level");
  inst.n_units = require_int(j, "n_units", "top level");
  inst.omega = require_real(j, "omega", "top level");
  inst.alpha = require_real(j, "alpha", "top level");
  inst.w_max = require_int(j, "w_max", "top level");
  if (inst.n_users < 0 || inst.n_units < 0)
    throw parse_error("instance file: negative n_users or n_units");

  const auto& units = require(j, "units", "top level");
  if (!units.is_array() || static_cast<int>(units.size()) != inst.n_units)
    throw parse_error("instance file: 'units' must be an array of length n_units");
  inst.unit_pos.resize(inst.n_units);
  inst.capacity.resize(inst.n_units);
  inst.cost.resize(inst.n_units);
  for (int i = 0; i < inst.n_units; ++i) {
    std::string where = "units[" + std::to_string(i) + "]";
    const auto& js = units[i];
    reject_unknown_keys(js, {"id", "x", "y", "capacity", "cost"}, where);
    if (require_int(js, "id", where) != i)
      throw parse_error("instance file: " + where + " has id out of order");
    inst.unit_pos[i] = {require_real(js, "x", where), require_real(js, "y", where)};
    inst.capacity[i] = require_int(js, "capacity", where);
    inst.cost[i] = require_real(js, "cost", where);
  }

  const auto& users = require(j, "users", "top level");
  if (!users.is_array() || static_cast<int>(users.size()) != inst.n_users)
    throw parse_error("instance file: 'users' must be an array of length n_users");
  inst.user_pos.resize(inst.n_users);
  inst.presence.resize(inst.n_users);
  for (int i = 0; i < inst.n_users; ++i) {
    std::string where = "users[" + std::to_string(i) + "]";
    const auto& ju = users[i];
    reject_unknown_keys(ju, {"id", "x", "y", "p"}, where);
    if (require_int(ju, "id", where) != i)
      throw parse_error("instance file: " + where + " has id out of order");
    inst.user_pos[i] = {require_real(ju, "x", where), require_real(ju, "y", where)};
    inst.presence[i] = require_real(ju, "p", where);
  }

  const auto& edges = require(j, "edges", "top level");
  if (!edges.is_array()) throw parse_error("instance file: 'edges' must be an array");
  inst.edges.reserve(edges.size());
  for (size_t i = 0; i < edges.size(); ++i) {
    std::string where = "edges[" + std::to_string(i) + "]";
    const auto& je = edges[i];
    reject_unknown_keys(je, {"u", "s", "w_us", "w_su"}, where);
    Edge e;
    e.u = require_int(je, "u", where);
    e.s = require_int(je, "s", where);
    e.w_us = require_int(je, "w_us", where);
    e.w_su = require_int(je, "w_su", where);
    if (e.u < 0 || e.u >= inst.n_users)
      throw parse_error("instance file: " + where + " user id out of range");
    if (e.s < 0 || e.s >= inst.n_units)
      throw parse_error("instance file: " + where + " unit id out of range");
    inst.edges.push_back(e);
  }
  inst.rebuild_adjacency();
  return inst;
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw error("cannot open for writing: " + path);
  f << to_json_string(inst);
  if (!f) throw error("write failed: " + path);
}

Instance load_instance(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return from_json_string(ss.str());
  } catch (const parse_error& e) {
    throw parse_error(path + ": " + e.what());
  }
}

}  // namespace nebp
