#pragma once

#include <string>
#include <vector>

#include "nebp/optimize.hpp"

namespace nebp {

// Shared knobs; every command draws its randomness from the explicit seed.
struct CommonOpts {
  uint64_t seed = 1;
  int workers = 0;  // 0 -> hardware concurrency
  BPParams bp;
  long long node_budget = 1'000'000'000;

  int effective_workers() const { return workers > 0 ? workers : default_workers(); }
};

struct ScenarioSpec {
  std::string name;
  std::vector<int> n_users, n_units, k, capacity, w_max;
  std::vector<double> omega, alpha;
  int replicates = 1;
  uint64_t seed = 1;
};

ScenarioSpec load_scenario(const std::string& path);

struct GenerateOpts {
  std::string scenario_path;
  std::string out_dir;
};
// One instance file per grid point x replicate, plus manifest.json.
// Returns the written instance file paths in deterministic order.
std::vector<std::string> cmd_generate(const GenerateOpts& opts);

struct EvalOpts {
  std::string instance_path;
  std::string x_spec = "all-on";       // all-on | all-off | bitmask
  std::string estimator = "mirror";    // mirror | fixed-t | exact | sampled
  std::string t_spec;                  // all-present | bitmask (fixed-t / exact)
  int sample_size = 1000;              // sampled
  std::string out_path;                // empty -> stdout
  CommonOpts common;
};
void cmd_eval(const EvalOpts& opts);

struct CompareOpts {
  std::vector<std::string> instance_paths;
  std::string x_spec = "all-on";
  std::vector<int> sample_sizes = {10, 100, 1000};
  std::string oracle = "auto";  // enum | bp | auto
  std::string out_path;
  CommonOpts common;
};
void cmd_compare(const CompareOpts& opts);

struct OptimizeOpts {
  std::string instance_path;
  std::string method = "greedy";      // greedy | exhaustive
  std::string estimator = "mirror";   // mirror | sampled
  std::string stop = "reldrop:0.005"; // none | steps:<k> | reldrop:<theta>
  int sample_size = 1000;
  std::string out_path;
  CommonOpts common;
};
void cmd_optimize(const OptimizeOpts& opts);

// Helpers shared with tests.
ServiceConfig parse_x_spec(const Instance& inst, const std::string& spec);
PresencePattern parse_t_spec(const Instance& inst, const std::string& spec);
StopRule parse_stop_rule(const std::string& spec);

}  // namespace nebp
