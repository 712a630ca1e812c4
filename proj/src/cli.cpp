#include "cdl/cli.hpp"

#include "cdl/analysis.hpp"
#include "cdl/experiment.hpp"
#include "cdl/io.hpp"
#include "cdl/lowerbound.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cdl::cli {

namespace {

StrategyProfile parse_profile(const std::string& text, std::size_t players) {
  std::vector<StrategyIndex> choices;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(cell, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != cell.size()) throw ValidationError("bad strategy index '" + cell + "' in profile");
    choices.push_back(static_cast<StrategyIndex>(v));
  }
  if (choices.size() != players)
    throw ValidationError("profile lists " + std::to_string(choices.size()) + " entries for " + std::to_string(players) +
                          " players");
  return StrategyProfile(std::move(choices));
}

Json lowerbound_meta(const std::string& kind, const LowerBoundParams& p, std::size_t coverings) {
  return {{"kind", kind}, {"beta", p.beta}, {"L", p.L}, {"m", p.m}, {"coverings", coverings}};
}

TiePolicy parse_tie(const std::string& tie) {
  if (tie == "keep-current") return KeepCurrent{};
  if (tie == "lowest-index") return LowestIndex{};
  throw ValidationError("unknown tie policy " + tie + " (keep-current | lowest-index)");
}

Mode parse_mode(const std::string& mode) {
  if (mode == "strict") return Mode::Strict;
  if (mode == "permissive") return Mode::Permissive;
  throw ValidationError("unknown mode " + mode + " (strict | permissive)");
}

std::optional<LowerBoundParams> lowerbound_from_meta(const Json& meta) {
  if (!meta.is_object()) return std::nullopt;
  const std::string kind = meta.value("kind", std::string());
  if (kind != "lowerbound-gprime" && kind != "corollary") return std::nullopt;
  return LowerBoundParams{meta.at("beta").get<std::size_t>(), meta.at("L").get<std::size_t>(), meta.at("m").get<std::uint64_t>()};
}

int analyze_lowerbound(const LowerBoundParams& params, const CongestionGame& game, const MoveTrace& trace,
                       std::ostream& out) {
  const LowerBoundInstance inst = build_gprime(params);
  if (game_hash(inst.game) != game_hash(game)) throw ValidationError("game file does not match its lower-bound parameters");
  const BlockingReport blocking = verify_blocking_claim(inst, trace);
  const OptReference opt = all_s0_reference(inst);
  const RatioTrajectory curve = ratio_trajectory(inst, trace, opt);
  out << "lower-bound instance beta=" << params.beta << " L=" << params.L << " m=" << params.m << "\n";
  out << "P moves: " << blocking.p_moves << ", checkpoints: " << blocking.checkpoints
      << ", deviation checks: " << blocking.deviation_checks << "\n";
  auto line = [&](const char* name, const std::vector<ClaimViolation>& v) {
    out << "  " << name << ": " << (v.empty() ? "ok" : "VIOLATED at step " + std::to_string(v.front().step) + " (" + v.front().what + ")")
        << "\n";
  };
  line("equal_delay", blocking.equal_delay);
  line("deviation", blocking.deviation);
  line("congestion", blocking.congestion);
  line("blocked_s0", blocking.blocked_s0);
  line("dominance", blocking.dominance);
  line("worsening", blocking.worsening);
  out << "floor check: min ratio " << decimal(curve.min_ratio) << " (" << to_string(curve.min_ratio) << ") vs floor "
      << to_string(curve.floor) << " against C(all s_0)=" << opt.value << (curve.advisory ? " [advisory OPT]" : "")
      << ": " << (curve.holds ? "ok" : "VIOLATED") << "\n";
  return blocking.ok() && curve.holds ? kExitOk : kExitViolation;
}

}  // namespace

std::uint64_t budget_from_env(std::uint64_t fallback) {
  const char* text = std::getenv("CDL_BUDGET");
  if (!text || !*text) return fallback;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    if (pos == std::string(text).size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  std::cerr << "warning: ignoring invalid CDL_BUDGET=" << text << "\n";
  return fallback;
}

int cmd_gen(const GenOptions& options, std::ostream& out, std::ostream& err) {
  try {
    if (options.kind == "random") {
      const CongestionGame game = random_game(options.random, options.seed);
      Json meta = {{"kind", "random"},
                   {"seed", options.seed},
                   {"max_strategies", options.random.max_strategies},
                   {"max_a", options.random.max_a},
                   {"max_b", options.random.max_b}};
      write_text_file(options.out, canonical_text(game_to_json(game, meta)));
      out << "wrote " << options.out.string() << " (" << game.num_players() << " players, " << game.num_resources()
          << " resources)\n";
      return kExitOk;
    }
    LowerBoundParams params;
    if (options.kind == "lowerbound-gprime") {
      params = {options.beta, options.levels, options.m};
      if (params.m == 0) params.m = LowerBoundParams::smallest_feasible_m(params.beta, params.L);
    } else if (options.kind == "corollary") {
      params = corollary_params(options.n_target);
    } else {
      err << "error: unknown kind " << options.kind << " (random | lowerbound-gprime | corollary)\n";
      return kExitUsage;
    }
    const LowerBoundInstance inst = build_gprime(params);
    const LowerBoundSchedule schedule = build_algorithm1_schedule(inst, options.coverings);
    const Json meta = lowerbound_meta(options.kind, params, options.coverings);
    write_text_file(options.out, canonical_text(game_to_json(inst.game, meta)));
    const auto schedule_path = options.schedule_out ? *options.schedule_out
                                                    : std::filesystem::path(options.out.string() + ".schedule.json");
    ScheduleDocument doc{inst.initial, schedule.script, schedule.coverings,
                         {{"covering_length", schedule.covering_length},
                          {"run_moves", schedule.run.size()},
                          {"max_moves_per_covering", schedule.max_moves_per_covering},
                          {"max_run_moves", schedule.max_run_moves},
                          {"mode", "permissive"}}};
    write_text_file(schedule_path, canonical_text(schedule_to_json(doc)));
    out << "wrote " << options.out.string() << " (" << inst.game.num_players() << " players, "
        << inst.game.num_resources() << " resources, beta=" << params.beta << ", L=" << params.L << ", m=" << params.m
        << ")\nwrote " << schedule_path.string() << " (" << schedule.script.steps.size() << " steps, T="
        << schedule.covering_length << ")\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  std::optional<LoadedGame> loaded;
  SchedulePolicy policy;
  StrategyProfile initial;
  FairnessSpec spec;
  std::size_t coverings = options.coverings;
  Mode mode = Mode::Strict;
  TiePolicy tie;
  std::optional<std::uint64_t> seed;
  try {
    loaded.emplace(read_game_file(options.game));
    for (const auto& w : loaded->warnings) err << "warning: " << w << "\n";
    const CongestionGame& game = loaded->game;
    const std::size_t n = game.num_players();
    mode = parse_mode(options.mode);
    tie = parse_tie(options.tie);
    if (options.policy == "round-robin") {
      policy = RoundRobin{};
      spec = {n, 1};
    } else if (options.policy == "random-fair") {
      spec = {options.T == 0 ? n : options.T, options.beta};
      spec.validate(n);
      policy = RandomFair{spec, options.seed};
      seed = options.seed;
    } else if (options.policy == "scripted") {
      if (!options.schedule) throw ValidationError("scripted policy needs --schedule");
      ScheduleDocument doc = schedule_from_json(read_json_file(*options.schedule));
      coverings = doc.coverings;
      if (coverings == 0 || doc.script.steps.size() % coverings != 0)
        throw ValidationError("schedule steps do not split into the declared coverings");
      spec = {doc.script.steps.size() / coverings, 1};
      initial = doc.initial;
      policy = std::move(doc.script);
    } else {
      throw ValidationError("unknown policy " + options.policy + " (round-robin | random-fair | scripted)");
    }
    if (options.policy != "scripted") {
      if (options.initial == "zeros") {
        initial = StrategyProfile::uniform(n, 0);
      } else if (options.initial == "random") {
        initial = random_profile(game, options.seed);
        seed = options.seed;
      } else {
        initial = parse_profile(options.initial, n);
      }
    }
    validate_profile(game, initial);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const CongestionGame& game = loaded->game;
  MoveTrace trace;
  try {
    trace = run_dynamics(game, initial, policy, coverings, mode, tie);
  } catch (const ValidationError& e) {
    err << "error: illegal schedule: " << e.what() << "\n";
    return kExitIllegalSchedule;
  }
  if (options.policy == "scripted") {
    // report the tightest β the scripted run satisfies
    std::vector<std::size_t> counts(game.num_players());
    std::size_t beta = 1;
    for (std::size_t begin = 0; begin < trace.moves.size(); begin += spec.T) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t t = begin; t < begin + spec.T; ++t) beta = std::max(beta, ++counts[trace.moves[t].player]);
    }
    spec.beta = beta;
  }

  TraceMeta meta;
  meta.seed = seed;
  meta.policy = options.policy;
  meta.T = spec.T;
  meta.beta = spec.beta;
  meta.game_hash = game_hash(game);
  meta.initial = initial;
  meta.mode = mode;
  meta.tie = options.tie;
  meta.coverings = trace.num_coverings();
  try {
    write_text_file(options.out, trace_csv(trace));
    write_text_file(sidecar_path(options.out), canonical_text(trace_meta_to_json(meta)));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const auto validation = validate_fairness(trace, game.num_players(), spec);
  std::size_t live = 0, fair = 0;
  for (const auto& c : validation.coverings) {
    live += c.idle_players.empty() ? 1 : 0;
    fair += c.ok() ? 1 : 0;
  }
  std::size_t improving = 0, indifferent = 0, stays = 0;
  for (const Move& m : trace.moves) {
    if (m.flag == MoveFlag::Improving) ++improving;
    if (m.flag == MoveFlag::Indifferent) ++indifferent;
    if (m.flag == MoveFlag::Stay) ++stays;
  }
  out << "wrote " << options.out.string() << " (" << trace.moves.size() << " moves: " << improving << " improving, "
      << indifferent << " indifferent, " << stays << " stays)\n";
  out << "coverings: " << validation.coverings.size() << " of length T=" << spec.T << "; live: " << live
      << "; (T,beta=" << spec.beta << ")-fair: " << fair << "\n";
  const Cost final_cost = trace.moves.empty() ? social_cost(game, initial) : trace.moves.back().social_cost;
  out << "final social cost: " << final_cost << (is_nash(game, trace.final_profile()).nash ? " (Nash equilibrium)" : "")
      << "\n";
  return kExitOk;
}

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const Json game_json = read_json_file(options.game);
    const GameDocument doc = game_from_json(game_json);
    LoadedGame loaded = load_game(doc);
    for (const auto& w : loaded.warnings) err << "warning: " << w << "\n";
    const CongestionGame& game = loaded.game;
    auto [trace, meta] = read_trace_files(options.trace);
    if (meta.game_hash != game_hash(game)) throw ValidationError("trace was recorded on a different game (hash mismatch)");
    verify_trace_replay(game, trace);

    if (const auto params = lowerbound_from_meta(doc.meta)) return analyze_lowerbound(*params, game, trace, out);

    OptimumCertificate opt;
    if (options.opt_profile) {
      opt.profile = parse_profile(*options.opt_profile, game.num_players());
      validate_profile(game, opt.profile);
      opt.value = social_cost(game, opt.profile);
      opt.exact = false;
    } else {
      try {
        opt = compute_opt(game, options.budget);
      } catch (const BudgetExceeded& e) {
        if (!options.heuristic_opt) throw;
        err << "note: " << e.what() << "\n";
        opt = heuristic_opt(game, meta.seed.value_or(0));
      }
    }

    const FairnessSpec spec{meta.T, meta.beta};
    const bool fair = validate_fairness(trace, game.num_players(), spec).valid();
    SuiteOptions suite{fair, game.is_symmetric()};
    if (!suite.asymmetric && !suite.symmetric)
      throw ValidationError("trace is not (T,beta)-fair and the game is not symmetric: no lemma family applies");
    const LemmaSuiteReport report = check_lemma_suite(game, trace, opt, spec, suite);

    out << "OPT = " << opt.value << (opt.exact ? " (exact, " + std::to_string(opt.explored) + " profiles)" : " (upper bound)")
        << "; T=" << spec.T << " beta=" << spec.beta << "; mode " << to_string(trace.mode)
        << (report.advisory ? "; verdicts advisory" : "") << "\n";
    std::vector<std::string> names;
    for (const auto& cr : report.coverings) {
      for (const auto& c : cr.checks) {
        if (std::find(names.begin(), names.end(), c.name) == names.end()) names.emplace_back(c.name);
      }
    }
    std::ostringstream csv;
    csv << "covering,start_cost,end_cost,start_potential,end_potential,rho,h,gamma,ratio";
    for (const auto& name : names) csv << ',' << name;
    csv << '\n';
    for (const auto& cr : report.coverings) {
      const auto& q = cr.values;
      out << "covering " << cr.covering << ": C " << q.start_cost << " -> " << q.end_cost << ", rho " << q.rho << ", H "
          << q.h;
      if (q.n_gamma) out << ", Gamma " << to_string(*q.gamma(game.num_players()));
      if (cr.ratio) out << ", ratio " << to_string(*cr.ratio) << " (" << decimal(*cr.ratio, 4) << ")";
      out << "\n";
      for (const auto& c : cr.checks) out << "    " << c.text() << "\n";
      csv << cr.covering << ',' << q.start_cost << ',' << q.end_cost << ',' << q.start_potential << ',' << q.end_potential
          << ',' << q.rho << ',' << q.h << ',' << (q.n_gamma ? to_string(*q.gamma(game.num_players())) : "") << ','
          << (cr.ratio ? to_string(*cr.ratio) : "");
      for (const auto& name : names) {
        const InequalityCheck* c = cr.find(name);
        csv << ',' << (c ? (c->holds ? "ok" : "violated") : "");
      }
      csv << '\n';
    }

    bool violated = !report.all_hold();
    const StrategyProfile final_profile = trace.final_profile();
    if (is_nash(game, final_profile).nash && opt.value > 0) {
      const Rational ratio(social_cost(game, final_profile), opt.value);
      const bool ok = ratio <= Rational(5, 2);
      out << "final state is a Nash equilibrium; C/OPT = " << to_string(ratio) << " <= 5/2: " << (ok ? "ok" : "VIOLATED")
          << "\n";
      violated = violated || !ok;
    }
    if (options.csv) write_text_file(*options.csv, csv.str());
    if (violated && !report.advisory) {
      err << "theorem violation detected\n";
      return kExitViolation;
    }
    if (violated) out << "some advisory checks failed (OPT inexact or permissive trace)\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_experiment(const ExperimentOptions& options, std::ostream& out, std::ostream& err) {
  ExperimentSummary summary;
  try {
    ExperimentConfig config = experiment_config_from_json(read_json_file(options.config));
    config.budget = options.budget;
    summary = run_experiments(config, options.out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  for (const auto& r : summary.rows) {
    out << r.experiment << " beta=" << r.beta << " T=" << r.T << ": runs " << r.runs << ", errors " << r.errors
        << ", violations " << r.violations << ", worst final ratio " << decimal(r.worst_final_ratio, 4) << " (bound "
        << to_string(r.bound) << ")\n";
  }
  if (summary.total_errors() > 0) err << summary.total_errors() << " rows failed; see the per-experiment CSVs\n";
  if (summary.total_violations() > 0) {
    err << "theorem violation detected\n";
    return kExitViolation;
  }
  return kExitOk;
}

}  // namespace cdl::cli
