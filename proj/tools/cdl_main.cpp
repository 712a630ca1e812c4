#include "cdl/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace cdl::cli;
  CLI::App app{"cdl: best-response dynamics lab for linear congestion games"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "generate a game (and a schedule for lower-bound kinds)");
  g->add_option("kind", gen.kind, "random | lowerbound-gprime | corollary")->required();
  g->add_option("--n", gen.random.players, "players (random)");
  g->add_option("--m", gen.random.resources, "resources (random) or main resources per level (lower bound)");
  g->add_option("--max-strategies", gen.random.max_strategies, "strategies per player, at most (random)");
  g->add_option("--max-strategy-size", gen.random.max_strategy_size, "resources per strategy, at most (random)");
  g->add_option("--max-a", gen.random.max_a, "largest slope coefficient (random)");
  g->add_option("--max-b", gen.random.max_b, "largest offset coefficient (random)");
  g->add_flag("--symmetric", gen.random.symmetric, "all players share one strategy list (random)");
  g->add_option("--seed", gen.seed, "generator seed");
  g->add_option("--beta", gen.beta, "unfairness index, a power of two above 10 (lower bound)");
  g->add_option("--levels", gen.levels, "L, the highest level (lower bound)");
  g->add_option("--n-target", gen.n_target, "target player count (corollary)");
  g->add_option("--coverings", gen.coverings, "coverings the scripted run is cut into (lower bound)");
  g->add_option("--out", gen.out, "game file to write")->required();
  auto* schedule_out = g->add_option("--schedule-out", "schedule file (default <out>.schedule.json)");

  RunOptions run;
  auto* r = app.add_subcommand("run", "run best-response dynamics and write a trace");
  r->add_option("game", run.game, "game file")->required();
  r->add_option("--policy", run.policy, "round-robin | random-fair | scripted");
  r->add_option("--T", run.T, "covering length (random-fair; default n)");
  r->add_option("--beta", run.beta, "moves per player per covering, at most (random-fair)");
  r->add_option("--seed", run.seed, "scheduler and initial-profile seed");
  r->add_option("--coverings", run.coverings, "number of coverings to run");
  r->add_option("--mode", run.mode, "strict | permissive");
  r->add_option("--tie", run.tie, "keep-current | lowest-index");
  auto* schedule = r->add_option("--schedule", "schedule file (scripted)");
  r->add_option("--initial", run.initial, "zeros | random | comma-separated strategy indices");
  r->add_option("--out", run.out, "trace CSV to write (sidecar <out>.meta.json)")->required();

  AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "check the per-covering inequalities on a trace");
  a->add_option("game", analyze.game, "game file")->required();
  a->add_option("trace", analyze.trace, "trace CSV")->required();
  a->add_flag("--heuristic-opt", analyze.heuristic_opt, "fall back to a heuristic optimum when the budget is exceeded");
  auto* opt_profile = a->add_option("--opt-profile", "reference optimum as comma-separated strategy indices");
  auto* csv = a->add_option("--csv", "per-covering CSV report");

  ExperimentOptions experiment;
  auto* x = app.add_subcommand("experiment", "run a batch of seeded experiments");
  x->add_option("config", experiment.config, "experiment config JSON")->required();
  x->add_option("--out", experiment.out, "results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::uint64_t budget = budget_from_env(analyze.budget);
  if (g->parsed()) {
    if (*schedule_out) gen.schedule_out = schedule_out->as<std::string>();
    if (gen.kind == "lowerbound-gprime" && g->count("--m") > 0) gen.m = gen.random.resources;
    return cmd_gen(gen, std::cout, std::cerr);
  }
  if (r->parsed()) {
    if (*schedule) run.schedule = schedule->as<std::string>();
    return cmd_run(run, std::cout, std::cerr);
  }
  if (a->parsed()) {
    if (*opt_profile) analyze.opt_profile = opt_profile->as<std::string>();
    if (*csv) analyze.csv = csv->as<std::string>();
    analyze.budget = budget;
    return cmd_analyze(analyze, std::cout, std::cerr);
  }
  experiment.budget = budget;
  return cmd_experiment(experiment, std::cout, std::cerr);
}
