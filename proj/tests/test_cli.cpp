#include "cdl/cli.hpp"
#include "cdl/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cdl;
using namespace cdl::cli;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("cdl_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

struct Captured {
  int code;
  std::string out;
  std::string err;
};

template <typename Options, typename Command>
Captured invoke(Command command, const Options& options) {
  std::ostringstream out, err;
  const int code = command(options, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path random_game_file(const std::filesystem::path& dir, std::uint64_t seed, bool symmetric = false) {
  GenOptions gen;
  gen.random.players = 4;
  gen.random.resources = 6;
  gen.random.symmetric = symmetric;
  gen.seed = seed;
  gen.out = dir / ("game" + std::to_string(seed) + ".json");
  REQUIRE(invoke(cmd_gen, gen).code == kExitOk);
  return gen.out;
}

}  // namespace

TEST_CASE("gen random is deterministic") {
  const auto dir = scratch_dir("gen");
  GenOptions gen;
  gen.seed = 7;
  gen.out = dir / "a.json";
  CHECK(invoke(cmd_gen, gen).code == kExitOk);
  gen.out = dir / "b.json";
  CHECK(invoke(cmd_gen, gen).code == kExitOk);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  const LoadedGame loaded = read_game_file(dir / "a.json");
  CHECK(loaded.game.num_players() == 4);
  CHECK(loaded.meta.at("seed") == 7);
}

TEST_CASE("gen rejects invalid parameters") {
  const auto dir = scratch_dir("gen_bad");
  GenOptions gen;
  gen.kind = "lowerbound-gprime";
  gen.beta = 12;
  gen.out = dir / "g.json";
  const Captured bad = invoke(cmd_gen, gen);
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("beta") != std::string::npos);
  gen.kind = "nonsense";
  CHECK(invoke(cmd_gen, gen).code == kExitUsage);
}

TEST_CASE("run and analyze a random-fair trace") {
  const auto dir = scratch_dir("run");
  const auto game = random_game_file(dir, 3);
  RunOptions run;
  run.game = game;
  run.policy = "random-fair";
  run.T = 8;
  run.beta = 2;
  run.seed = 1;
  run.coverings = 3;
  run.initial = "random";
  run.out = dir / "trace.csv";
  const Captured ran = invoke(cmd_run, run);
  REQUIRE(ran.code == kExitOk);
  CHECK(ran.out.find("fair: 3") != std::string::npos);
  const auto [trace, meta] = read_trace_files(run.out);
  CHECK(trace.moves.size() == 24);
  CHECK(meta.T == 8);
  CHECK(meta.beta == 2);

  AnalyzeOptions analyze;
  analyze.game = game;
  analyze.trace = run.out;
  analyze.csv = dir / "report.csv";
  const Captured report = invoke(cmd_analyze, analyze);
  CHECK(report.code == kExitOk);
  CHECK(report.out.find("VIOLATED") == std::string::npos);
  CHECK(report.out.find("lemma5") != std::string::npos);
  const std::string csv = slurp(dir / "report.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("round-robin run writes n rows per covering") {
  const auto dir = scratch_dir("rr");
  RunOptions run;
  run.game = random_game_file(dir, 4, true);
  run.coverings = 3;
  run.out = dir / "rr.csv";
  REQUIRE(invoke(cmd_run, run).code == kExitOk);
  const std::string csv = slurp(run.out);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 4);

  AnalyzeOptions analyze;
  analyze.game = run.game;
  analyze.trace = run.out;
  const Captured report = invoke(cmd_analyze, analyze);
  CHECK(report.code == kExitOk);
  CHECK(report.out.find("Gamma") != std::string::npos);
}

TEST_CASE("runs are byte-identical across invocations") {
  const auto dir = scratch_dir("determinism");
  RunOptions run;
  run.game = random_game_file(dir, 5);
  run.policy = "random-fair";
  run.T = 6;
  run.beta = 3;
  run.seed = 42;
  run.coverings = 4;
  run.out = dir / "one.csv";
  REQUIRE(invoke(cmd_run, run).code == kExitOk);
  run.out = dir / "two.csv";
  REQUIRE(invoke(cmd_run, run).code == kExitOk);
  CHECK(slurp(dir / "one.csv") == slurp(dir / "two.csv"));
  CHECK(slurp(dir / "one.csv.meta.json") == slurp(dir / "two.csv.meta.json"));
}

TEST_CASE("usage and I/O errors exit with 1") {
  const auto dir = scratch_dir("usage");
  RunOptions run;
  run.game = dir / "missing.json";
  run.out = dir / "t.csv";
  CHECK(invoke(cmd_run, run).code == kExitUsage);
  run.game = random_game_file(dir, 6);
  run.policy = "bogus";
  CHECK(invoke(cmd_run, run).code == kExitUsage);
  run.policy = "round-robin";
  run.mode = "lenient";
  CHECK(invoke(cmd_run, run).code == kExitUsage);

  AnalyzeOptions analyze;
  analyze.game = run.game;
  analyze.trace = dir / "absent.csv";
  CHECK(invoke(cmd_analyze, analyze).code == kExitUsage);

  run.mode = "strict";
  run.out = dir / "t.csv";
  REQUIRE(invoke(cmd_run, run).code == kExitOk);
  analyze.trace = run.out;
  analyze.game = random_game_file(dir, 8);
  const Captured mismatch = invoke(cmd_analyze, analyze);
  CHECK(mismatch.code == kExitUsage);
  CHECK(mismatch.err.find("hash") != std::string::npos);

  analyze.game = run.game;
  analyze.budget = 1;
  CHECK(invoke(cmd_analyze, analyze).code == kExitUsage);
  analyze.heuristic_opt = true;
  CHECK(invoke(cmd_analyze, analyze).code == kExitOk);
}

TEST_CASE("a fabricated worsening move is reported as a theorem violation") {
  const auto dir = scratch_dir("violation");
  const CongestionGame g({Delay{1, 0}, Delay{1, 10}}, {{{0}, {1}}});
  write_text_file(dir / "g.json", canonical_text(game_to_json(g)));
  RunOptions run;
  run.game = dir / "g.json";
  run.out = dir / "t.csv";
  REQUIRE(invoke(cmd_run, run).code == kExitOk);
  write_text_file(run.out, std::string(kTraceHeader) + "\n0,0,0,1,1,11,improving,11,11\n");
  AnalyzeOptions analyze;
  analyze.game = run.game;
  analyze.trace = run.out;
  const Captured report = invoke(cmd_analyze, analyze);
  CHECK(report.code == kExitViolation);
  CHECK(report.out.find("VIOLATED") != std::string::npos);
}

TEST_CASE("lower-bound instance: permissive replay passes, strict replay is illegal") {
  const auto dir = scratch_dir("lowerbound");
  GenOptions gen;
  gen.kind = "lowerbound-gprime";
  gen.beta = 16;
  gen.levels = 1;
  gen.coverings = 2;
  gen.out = dir / "lb.json";
  REQUIRE(invoke(cmd_gen, gen).code == kExitOk);
  CHECK(std::filesystem::exists(dir / "lb.json.schedule.json"));

  RunOptions run;
  run.game = gen.out;
  run.policy = "scripted";
  run.schedule = dir / "lb.json.schedule.json";
  run.mode = "permissive";
  run.coverings = 2;
  run.out = dir / "lb.csv";
  REQUIRE(invoke(cmd_run, run).code == kExitOk);

  AnalyzeOptions analyze;
  analyze.game = gen.out;
  analyze.trace = run.out;
  const Captured report = invoke(cmd_analyze, analyze);
  CHECK(report.code == kExitOk);
  CHECK(report.out.find("floor check") != std::string::npos);

  run.mode = "strict";
  run.out = dir / "strict.csv";
  CHECK(invoke(cmd_run, run).code == kExitIllegalSchedule);
}

TEST_CASE("corollary generation") {
  const auto dir = scratch_dir("corollary");
  GenOptions gen;
  gen.kind = "corollary";
  gen.n_target = 256;
  gen.out = dir / "c.json";
  REQUIRE(invoke(cmd_gen, gen).code == kExitOk);
  const LoadedGame loaded = read_game_file(gen.out);
  CHECK(loaded.meta.at("beta") == 16);
  CHECK(loaded.meta.at("L") == 1);
}

TEST_CASE("experiments") {
  const auto dir = scratch_dir("experiment");
  write_text_file(dir / "empty.json", "{\"experiments\": []}\n");
  ExperimentOptions options;
  options.config = dir / "empty.json";
  options.out = dir / "empty_out";
  CHECK(invoke(cmd_experiment, options).code == kExitOk);

  write_text_file(dir / "small.json", R"({"experiments": [{"name": "small", "generator": {"n": 3, "m": 4,
    "max_strategies": 3}, "betas": [1, 2], "coverings": 2, "seeds": 5, "seed_base": 10}]})");
  options.config = dir / "small.json";
  options.out = dir / "first";
  CHECK(invoke(cmd_experiment, options).code == kExitOk);
  options.out = dir / "second";
  CHECK(invoke(cmd_experiment, options).code == kExitOk);
  const std::string first = slurp(dir / "first" / "small.csv");
  CHECK(first == slurp(dir / "second" / "small.csv"));
  CHECK(slurp(dir / "first" / "summary.csv") == slurp(dir / "second" / "summary.csv"));
  CHECK(std::count(first.begin(), first.end(), '\n') == 1 + 5 * 2 * 2);
  CHECK(first.find(",error") == std::string::npos);

  write_text_file(dir / "broken.json", "{\"experiments\": [{\"betas\": [1]}]}");
  options.config = dir / "broken.json";
  CHECK(invoke(cmd_experiment, options).code == kExitUsage);
}

TEST_CASE("budget from the environment") {
  ::setenv("CDL_BUDGET", "1234", 1);
  CHECK(budget_from_env(5) == 1234);
  ::setenv("CDL_BUDGET", "junk", 1);
  CHECK(budget_from_env(5) == 5);
  ::unsetenv("CDL_BUDGET");
  CHECK(budget_from_env(5) == 5);
}
