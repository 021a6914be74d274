#include "nebp/cli.hpp"

#include <chrono>
#include <optional>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace nebp {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw error("cannot open for writing: " + path);
  f << text;
  if (!f) throw error("write failed: " + path);
}

// The timestamp lives only in manifests so data files stay byte-identical
// per seed.
void write_manifest_at(const std::string& path, ordered_json body) {
  body["generated_at"] = timestamp_utc();
  write_text(path, body.dump(2) + "\n");
}

void write_manifest(const std::string& out_path, ordered_json body) {
  write_manifest_at(out_path + ".manifest.json", std::move(body));
}

std::string hash_hex(uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_stem(const std::string& path) { return fs::path(path).stem().string(); }

// log2 of the unpruned z-search space; the cheap scale check for the
// enumeration-backed estimators.
double log2_search_space(const Instance& inst) {
  double bits = 0.0;
  for (UserId u = 0; u < inst.n_users; ++u)
    bits += std::log2(static_cast<double>(inst.user_degree(u)) + 1.0);
  return bits;
}

void require_enumerable(const Instance& inst, long long budget, const std::string& what) {
  if (log2_search_space(inst) > std::log2(static_cast<double>(budget)))
    throw resource_error(what + ": instance search space exceeds the node budget of " +
                         std::to_string(budget) + "; use a BP estimator instead");
}

ordered_json bp_params_json(const BPParams& bp) {
  ordered_json j;
  j["damping"] = bp.damping;
  j["tol"] = bp.tol;
  j["max_iters"] = bp.max_iters;
  j["floor"] = bp.floor;
  j["seed"] = bp.seed;
  j["schedule"] =
      bp.schedule == BPParams::Schedule::kRandomPermutation ? "random-permutation" : "sequential";
  return j;
}

std::string observable_csv_header() {
  return "instance_id,x_bitmask_or_hash,source,W,N,Osat,F,energy,converged\n";
}

std::string observable_csv_row(const std::string& instance_id, const ServiceConfig& x,
                               const ObservableSet& o) {
  std::ostringstream row;
  row << instance_id << ',' << x.bitmask() << ',' << source_name(o.source) << ','
      << format_double(o.W) << ',' << format_double(o.N) << ',' << format_double(o.Osat) << ','
      << format_double(o.F) << ',' << format_double(o.energy) << ',' << (o.converged ? 1 : 0)
      << '\n';
  return row.str();
}

std::vector<int> int_list(const ordered_json& v, const std::string& key) {
  std::vector<int> out;
  if (v.is_number_integer()) {
    out.push_back(v.get<int>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number_integer())
        throw parse_error("scenario file: '" + key + "' must hold integers");
      out.push_back(e.get<int>());
    }
  } else {
    throw parse_error("scenario file: '" + key + "' must be an integer or list");
  }
  if (out.empty()) throw parse_error("scenario file: '" + key + "' must not be empty");
  return out;
}

std::vector<double> real_list(const ordered_json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number())
        throw parse_error("scenario file: '" + key + "' must hold numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw parse_error("scenario file: '" + key + "' must be a number or list");
  }
  if (out.empty()) throw parse_error("scenario file: '" + key + "' must not be empty");
  return out;
}

}  // namespace

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw error("cannot open scenario file: " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error("scenario file " + path + ": " + e.what());
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* allowed[] = {"name",  "n_users", "n_units",    "k",   "capacity",
                                    "w_max", "omega",   "alpha",      "replicates", "seed"};
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) throw parse_error("scenario file: unknown key '" + it.key() + "'");
  }
  auto need = [&](const char* key) -> const ordered_json& {
    auto it = j.find(key);
    if (it == j.end()) throw parse_error("scenario file: missing key '" + std::string(key) + "'");
    return *it;
  };
  ScenarioSpec spec;
  spec.name = need("name").get<std::string>();
  spec.n_users = int_list(need("n_users"), "n_users");
  spec.n_units = int_list(need("n_units"), "n_units");
  spec.k = int_list(need("k"), "k");
  spec.capacity = int_list(need("capacity"), "capacity");
  spec.w_max = int_list(need("w_max"), "w_max");
  spec.omega = real_list(need("omega"), "omega");
  spec.alpha = j.contains("alpha") ? real_list(j["alpha"], "alpha") : std::vector<double>{0.0};
  spec.replicates = need("replicates").get<int>();
  spec.seed = need("seed").get<uint64_t>();
  if (spec.replicates < 0) throw parse_error("scenario file: replicates must be >= 0");
  return spec;
}

std::vector<std::string> cmd_generate(const GenerateOpts& opts) {
  ScenarioSpec spec = load_scenario(opts.scenario_path);
  fs::create_directories(opts.out_dir);

  std::vector<GeneratorParams> grid;
  for (int nu : spec.n_users)
    for (int ns : spec.n_units)
      for (int k : spec.k)
        for (int c : spec.capacity)
          for (int wm : spec.w_max)
            for (double om : spec.omega)
              for (double al : spec.alpha)
                grid.push_back({nu, ns, k, c, wm, om, al, 0});

  std::vector<std::string> files;
  ordered_json manifest;
  manifest["command"] = "generate";
  manifest["scenario_file"] = opts.scenario_path;
  manifest["scenario_name"] = spec.name;
  manifest["master_seed"] = spec.seed;
  manifest["replicates"] = spec.replicates;
  manifest["instances"] = ordered_json::array();

  for (size_t g = 0; g < grid.size(); ++g) {
    for (int rep = 0; rep < spec.replicates; ++rep) {
      size_t index = g * spec.replicates + rep;
      GeneratorParams params = grid[g];
      params.seed = splitmix64(spec.seed + index);
      Instance inst = generate_instance(params);
      auto violations = validate(inst);
      if (!violations.empty())
        throw error("generated instance failed validation: " + violations.front());
      std::string name = spec.name + "_g" + std::to_string(g) + "_r" + std::to_string(rep) +
                         ".json";
      std::string path = (fs::path(opts.out_dir) / name).string();
      save_instance(inst, path);
      files.push_back(path);

      ordered_json entry;
      entry["file"] = name;
      entry["grid_index"] = g;
      entry["replicate"] = rep;
      entry["seed"] = params.seed;
      ordered_json p;
      p["n_users"] = params.n_users;
      p["n_units"] = params.n_units;
      p["k"] = params.k;
      p["capacity"] = params.c_uniform;
      p["w_max"] = params.w_max;
      p["omega"] = params.omega;
      p["alpha"] = params.alpha;
      entry["params"] = std::move(p);
      entry["hash"] = hash_hex(instance_hash(inst));
      manifest["instances"].push_back(std::move(entry));
    }
  }
  write_manifest_at((fs::path(opts.out_dir) / "manifest.json").string(), std::move(manifest));
  return files;
}

ServiceConfig parse_x_spec(const Instance& inst, const std::string& spec) {
  if (spec == "all-on") return ServiceConfig::all_on(inst);
  if (spec == "all-off") return ServiceConfig::all_off(inst);
  if (static_cast<int>(spec.size()) != inst.n_units)
    throw param_error("x spec '" + spec + "' does not match n_units = " +
                      std::to_string(inst.n_units));
  ServiceConfig x;
  x.on.resize(inst.n_units);
  for (int s = 0; s < inst.n_units; ++s) {
    if (spec[s] != '0' && spec[s] != '1') throw param_error("x spec must be a 0/1 bitmask");
    x.on[s] = spec[s] == '1';
  }
  return x;
}

PresencePattern parse_t_spec(const Instance& inst, const std::string& spec) {
  if (spec == "all-present") return PresencePattern::all_present(inst);
  if (static_cast<int>(spec.size()) != inst.n_users)
    throw param_error("t spec '" + spec + "' does not match n_users = " +
                      std::to_string(inst.n_users));
  PresencePattern t;
  t.present.resize(inst.n_users);
  for (int u = 0; u < inst.n_users; ++u) {
    if (spec[u] != '0' && spec[u] != '1') throw param_error("t spec must be a 0/1 bitmask");
    t.present[u] = spec[u] == '1';
  }
  return t;
}

StopRule parse_stop_rule(const std::string& spec) {
  if (spec == "none") return StopRule::none();
  if (spec.rfind("steps:", 0) == 0) return StopRule::steps(std::stoi(spec.substr(6)));
  if (spec.rfind("reldrop:", 0) == 0) return StopRule::rel_drop(std::stod(spec.substr(8)));
  throw param_error("unknown stop rule '" + spec + "' (none | steps:<k> | reldrop:<theta>)");
}

void cmd_eval(const EvalOpts& opts) {
  Instance inst = load_instance(opts.instance_path);
  ServiceConfig x = parse_x_spec(inst, opts.x_spec);
  EnumLimits limits{opts.common.node_budget};
  BPParams bp = opts.common.bp;

  ObservableSet obs;
  std::optional<ConvergenceReport> report;
  if (opts.estimator == "mirror") {
    BPRun run = run_mirror(inst, x, bp);
    report = run.report;
    obs = compute_from_marginals(inst, x, run.marginals, Source::kMirrorBP,
                                 run.report.converged);
  } else if (opts.estimator == "fixed-t") {
    if (opts.t_spec.empty()) throw param_error("estimator fixed-t requires --t");
    PresencePattern t = parse_t_spec(inst, opts.t_spec);
    BPRun run = run_fixed_t(inst, x, t, bp);
    report = run.report;
    obs = compute_from_marginals(inst, x, run.marginals, Source::kFixedTBP,
                                 run.report.converged);
  } else if (opts.estimator == "exact") {
    require_enumerable(inst, opts.common.node_budget, "estimator exact");
    if (!opts.t_spec.empty()) {
      PresencePattern t = parse_t_spec(inst, opts.t_spec);
      obs = compute_exact(inst, x, exact_observables(inst, x, t, limits));
    } else {
      obs = compute_exact(inst, x, exact_average(inst, x, limits), Source::kExact);
    }
  } else if (opts.estimator == "sampled") {
    require_enumerable(inst, opts.common.node_budget, "estimator sampled");
    AveragedResult r = sampled_average(inst, x, opts.sample_size, opts.common.seed, limits,
                                       opts.common.effective_workers());
    obs = compute_exact(inst, x, r);
  } else {
    throw param_error("unknown estimator '" + opts.estimator + "'");
  }

  std::string csv = observable_csv_header() + observable_csv_row(file_stem(opts.instance_path), x, obs);
  if (opts.out_path.empty()) {
    std::cout << csv;
    return;
  }
  write_text(opts.out_path, csv);
  ordered_json m;
  m["command"] = "eval";
  m["instance"] = opts.instance_path;
  m["instance_hash"] = hash_hex(instance_hash(inst));
  m["x"] = x.bitmask();
  m["estimator"] = opts.estimator;
  m["t"] = opts.t_spec;
  m["sample_size"] = opts.sample_size;
  m["seed"] = opts.common.seed;
  m["workers"] = opts.common.effective_workers();
  m["bp"] = bp_params_json(bp);
  if (report) {
    ordered_json r;
    r["iterations"] = report->iterations;
    r["residual"] = report->residual;
    r["converged"] = report->converged;
    r["floored_users"] = report->floored_users;
    m["convergence"] = std::move(r);
  }
  write_manifest(opts.out_path, std::move(m));
}

void cmd_compare(const CompareOpts& opts) {
  if (opts.instance_paths.empty()) throw param_error("compare: no instances given");
  if (opts.out_path.empty()) throw param_error("compare: --out is required");
  for (int s : opts.sample_sizes)
    if (s < 1) throw param_error("compare: sample sizes must be >= 1");

  struct Row {
    std::string instance_id;
    int sample_size;
    double w_mirror, n_mirror;
    double w_oracle, w_oracle_se, n_oracle, n_oracle_se;
    std::string oracle_source;
    bool mirror_converged;
    long long excluded;
  };
  struct Task {
    size_t inst_index;
    size_t s_index;
  };

  std::vector<Instance> instances(opts.instance_paths.size());
  std::vector<uint64_t> hashes(opts.instance_paths.size());
  std::vector<std::string> oracle_kind(opts.instance_paths.size());
  for (size_t i = 0; i < opts.instance_paths.size(); ++i) {
    instances[i] = load_instance(opts.instance_paths[i]);
    hashes[i] = instance_hash(instances[i]);
    if (opts.oracle == "enum" || opts.oracle == "bp") {
      oracle_kind[i] = opts.oracle;
    } else if (opts.oracle == "auto") {
      oracle_kind[i] = log2_search_space(instances[i]) <=
                               std::log2(static_cast<double>(opts.common.node_budget))
                           ? "enum"
                           : "bp";
    } else {
      throw param_error("compare: unknown oracle '" + opts.oracle + "'");
    }
    if (oracle_kind[i] == "enum")
      require_enumerable(instances[i], opts.common.node_budget, "compare oracle enum");
  }

  std::vector<Task> tasks;
  for (size_t i = 0; i < instances.size(); ++i)
    for (size_t si = 0; si < opts.sample_sizes.size(); ++si) tasks.push_back({i, si});

  std::vector<ObservableSet> mirror(instances.size());
  parallel_for(instances.size(), opts.common.effective_workers(), [&](size_t i) {
    BPRun run = run_mirror(instances[i], parse_x_spec(instances[i], opts.x_spec),
                           opts.common.bp);
    mirror[i] = compute_from_marginals(instances[i], parse_x_spec(instances[i], opts.x_spec),
                                       run.marginals, Source::kMirrorBP, run.report.converged);
  });

  EnumLimits limits{opts.common.node_budget};
  std::vector<Row> rows(tasks.size());
  parallel_for(tasks.size(), opts.common.effective_workers(), [&](size_t ti) {
    const Task& task = tasks[ti];
    const Instance& inst = instances[task.inst_index];
    ServiceConfig x = parse_x_spec(inst, opts.x_spec);
    int sample_size = opts.sample_sizes[task.s_index];
    uint64_t seed = splitmix64(opts.common.seed + ti);
    Row row;
    row.instance_id = file_stem(opts.instance_paths[task.inst_index]);
    row.sample_size = sample_size;
    row.w_mirror = mirror[task.inst_index].W;
    row.n_mirror = mirror[task.inst_index].N;
    row.mirror_converged = mirror[task.inst_index].converged;
    if (oracle_kind[task.inst_index] == "enum") {
      AveragedResult r = sampled_average(inst, x, sample_size, seed, limits, 1);
      if (!r.defined) throw error("compare: oracle undefined for " + row.instance_id);
      row.w_oracle = r.W;
      row.w_oracle_se = r.W_se;
      row.n_oracle = r.N;
      row.n_oracle_se = r.N_se;
      row.excluded = r.zero_ne;
      row.oracle_source = "sampled-enum";
    } else {
      Rng rng(seed);
      std::vector<PresencePattern> patterns(sample_size);
      for (auto& t : patterns) {
        t.present.resize(inst.n_users);
        for (UserId u = 0; u < inst.n_users; ++u)
          t.present[u] = uniform01(rng) < inst.presence[u] ? 1 : 0;
      }
      long long used = 0, excluded = 0;
      long double w = 0, n = 0, w2 = 0, n2 = 0;
      for (const auto& t : patterns) {
        try {
          BPRun run = run_fixed_t(inst, x, t, opts.common.bp);
          ObservableSet o = compute_from_marginals(inst, x, run.marginals, Source::kFixedTBP,
                                                   run.report.converged);
          if (!run.report.converged) {
            ++excluded;
            continue;
          }
          ++used;
          w += o.W;
          n += o.N;
          w2 += o.W * o.W;
          n2 += o.N * o.N;
        } catch (const degeneracy_error&) {
          ++excluded;
        }
      }
      if (used == 0) throw error("compare: BP oracle failed on every sample for " + row.instance_id);
      row.w_oracle = static_cast<double>(w / used);
      row.n_oracle = static_cast<double>(n / used);
      auto se = [used](long double sum, long double sum2) {
        if (used < 2) return 0.0;
        long double var = (sum2 - sum * sum / used) / (used - 1);
        return var > 0 ? std::sqrt(static_cast<double>(var) / used) : 0.0;
      };
      row.w_oracle_se = se(w, w2);
      row.n_oracle_se = se(n, n2);
      row.excluded = excluded;
      row.oracle_source = "sampled-fixed-t-bp";
    }
    rows[ti] = std::move(row);
  });

  std::ostringstream csv;
  csv << "instance_id,S,W_mirror,N_mirror,W_oracle,W_oracle_se,N_oracle,N_oracle_se,"
         "oracle_source,mirror_converged,zero_ne_excluded\n";
  for (const Row& r : rows) {
    csv << r.instance_id << ',' << r.sample_size << ',' << format_double(r.w_mirror) << ','
        << format_double(r.n_mirror) << ',' << format_double(r.w_oracle) << ','
        << format_double(r.w_oracle_se) << ',' << format_double(r.n_oracle) << ','
        << format_double(r.n_oracle_se) << ',' << r.oracle_source << ','
        << (r.mirror_converged ? 1 : 0) << ',' << r.excluded << '\n';
  }
  write_text(opts.out_path, csv.str());

  ordered_json m;
  m["command"] = "compare";
  m["x"] = opts.x_spec;
  m["oracle"] = opts.oracle;
  m["sample_sizes"] = opts.sample_sizes;
  m["seed"] = opts.common.seed;
  m["workers"] = opts.common.effective_workers();
  m["bp"] = bp_params_json(opts.common.bp);
  m["instances"] = ordered_json::array();
  for (size_t i = 0; i < opts.instance_paths.size(); ++i) {
    ordered_json e;
    e["file"] = opts.instance_paths[i];
    e["hash"] = hash_hex(hashes[i]);
    e["oracle"] = oracle_kind[i];
    m["instances"].push_back(std::move(e));
  }
  write_manifest(opts.out_path, std::move(m));
}

void cmd_optimize(const OptimizeOpts& opts) {
  if (opts.out_path.empty()) throw param_error("optimize: --out is required");
  Instance inst = load_instance(opts.instance_path);
  EnumLimits limits{opts.common.node_budget};

  Estimator estimator;
  if (opts.estimator == "mirror") {
    estimator = make_mirror_estimator(opts.common.bp);
  } else if (opts.estimator == "sampled") {
    require_enumerable(inst, opts.common.node_budget, "estimator sampled");
    estimator = make_sampled_estimator(opts.sample_size, opts.common.seed, limits, 1);
  } else {
    throw param_error("unknown estimator '" + opts.estimator + "'");
  }

  ordered_json m;
  m["command"] = "optimize";
  m["instance"] = opts.instance_path;
  m["instance_hash"] = hash_hex(instance_hash(inst));
  m["method"] = opts.method;
  m["estimator"] = opts.estimator;
  m["stop"] = opts.stop;
  m["sample_size"] = opts.sample_size;
  m["seed"] = opts.common.seed;
  m["workers"] = opts.common.effective_workers();
  m["bp"] = bp_params_json(opts.common.bp);

  if (opts.method == "greedy") {
    StopRule stop = parse_stop_rule(opts.stop);
    DecimationTrajectory traj =
        greedy_decimation(inst, estimator, stop, opts.common.effective_workers());
    std::ostringstream csv;
    csv << "step,unit_off,O_before,O_after,drop_abs,drop_rel_cum\n";
    double before = traj.initial.Osat;
    for (size_t i = 0; i < traj.steps.size(); ++i) {
      const DecimationStep& st = traj.steps[i];
      csv << (i + 1) << ',' << st.switched_off << ',' << format_double(before) << ','
          << format_double(st.observables.Osat) << ',' << format_double(st.drop_abs) << ','
          << format_double(st.drop_rel_cumulative) << '\n';
      before = st.observables.Osat;
    }
    write_text(opts.out_path, csv.str());
    m["initial_Osat"] = format_double(traj.initial.Osat);
    m["chosen_stop"] = traj.chosen_stop;
    m["x_at_stop"] = traj.chosen_stop >= 0 ? traj.steps[traj.chosen_stop].x_after.bitmask()
                                           : ServiceConfig::all_on(inst).bitmask();
    write_manifest(opts.out_path, std::move(m));
  } else if (opts.method == "exhaustive") {
    ExhaustiveResult res = exhaustive_x(inst, estimator, opts.common.effective_workers());
    std::ostringstream csv;
    csv << observable_csv_header();
    std::string id = file_stem(opts.instance_path);
    for (const ExhaustiveRow& row : res.table) csv << observable_csv_row(id, row.x, row.observables);
    write_text(opts.out_path, csv.str());
    ordered_json best;
    best["x"] = res.best.bitmask();
    best["F"] = res.best_observables.F;
    best["W"] = res.best_observables.W;
    best["N"] = res.best_observables.N;
    best["Osat"] = res.best_observables.Osat;
    best["energy"] = res.best_observables.energy;
    write_text(opts.out_path + ".best.json", best.dump(2) + "\n");
    m["best_x"] = res.best.bitmask();
    m["best_F"] = res.best_observables.F;
    write_manifest(opts.out_path, std::move(m));
  } else {
    throw param_error("unknown method '" + opts.method + "' (greedy | exhaustive)");
  }
}

}  // namespace nebp
