#include <iostream>

#include "CLI11.hpp"
#include "nebp/cli.hpp"

namespace {

void add_common(CLI::App* cmd, nebp::CommonOpts& common) {
  cmd->add_option("--seed", common.seed, "master seed for all randomness");
  cmd->add_option("--workers", common.workers, "worker threads (0 = hardware)");
  cmd->add_option("--damping", common.bp.damping, "BP damping in [0,1)")
      ->check(CLI::Range(0.0, 0.999999));
  cmd->add_option("--tol", common.bp.tol, "BP convergence threshold");
  cmd->add_option("--max-iters", common.bp.max_iters, "BP iteration cap");
  cmd->add_option("--floor", common.bp.floor, "BP underflow guard");
  cmd->add_option("--bp-seed", common.bp.seed, "BP schedule seed");
  cmd->add_option("--node-budget", common.node_budget, "enumeration node budget");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Service-unit activation solver: BP averaging over Nash equilibria"};
  app.require_subcommand(1);

  nebp::GenerateOpts gen;
  CLI::App* generate = app.add_subcommand("generate", "generate an instance batch from a scenario file");
  generate->add_option("scenario", gen.scenario_path, "scenario JSON file")->required();
  generate->add_option("--out", gen.out_dir, "output directory")->required();

  nebp::EvalOpts ev;
  CLI::App* eval = app.add_subcommand("eval", "evaluate observables of one configuration");
  eval->add_option("instance", ev.instance_path, "instance file")->required();
  eval->add_option("--x", ev.x_spec, "all-on | all-off | bitmask");
  eval->add_option("--estimator", ev.estimator, "mirror | fixed-t | exact | sampled");
  eval->add_option("--t", ev.t_spec, "presence pattern (fixed-t / exact)");
  eval->add_option("--sample-size", ev.sample_size, "samples for the sampled estimator");
  eval->add_option("--out", ev.out_path, "output CSV (default stdout)");
  add_common(eval, ev.common);

  nebp::CompareOpts cmp;
  CLI::App* compare = app.add_subcommand("compare", "mirror BP vs sampling oracle scatter data");
  compare->add_option("instances", cmp.instance_paths, "instance files")->required();
  compare->add_option("--x", cmp.x_spec, "all-on | all-off | bitmask");
  compare->add_option("--samples", cmp.sample_sizes, "oracle sample sizes");
  compare->add_option("--oracle", cmp.oracle, "enum | bp | auto");
  compare->add_option("--out", cmp.out_path, "output CSV")->required();
  add_common(compare, cmp.common);

  nebp::OptimizeOpts opt;
  CLI::App* optimize = app.add_subcommand("optimize", "greedy decimation or exhaustive search over x");
  optimize->add_option("instance", opt.instance_path, "instance file")->required();
  optimize->add_option("--method", opt.method, "greedy | exhaustive");
  optimize->add_option("--estimator", opt.estimator, "mirror | sampled");
  optimize->add_option("--stop", opt.stop, "none | steps:<k> | reldrop:<theta>");
  optimize->add_option("--sample-size", opt.sample_size, "samples for the sampled estimator");
  optimize->add_option("--out", opt.out_path, "output CSV")->required();
  add_common(optimize, opt.common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) nebp::cmd_generate(gen);
    if (*eval) nebp::cmd_eval(ev);
    if (*compare) nebp::cmd_compare(cmp);
    if (*optimize) nebp::cmd_optimize(opt);
  } catch (const nebp::param_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nebp::resource_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
