#include "cdl/generate.hpp"
#include "cdl/io.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace cdl;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("cdl_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("game JSON layout") {
  const CongestionGame g({Delay{2, 1}, Delay{0, 3}}, {{{0}, {0, 1}}, {{1}}});
  const Json json = game_to_json(g, {{"note", "x"}});
  CHECK(json.at("n") == 2);
  CHECK(json.at("resources").at(0).at("a") == 2);
  CHECK(json.at("resources").at(1).at("b") == 3);
  CHECK(json.at("strategies").at(0).at(1) == Json::array({0, 1}));
  CHECK(json.at("symmetric") == false);
  CHECK(json.at("meta").at("note") == "x");
  const std::string text = canonical_text(json);
  CHECK(text.find("\"meta\"") < text.find("\"n\""));
  CHECK(text.find("\"resources\"") < text.find("\"strategies\""));
  CHECK(text.back() == '\n');
}

TEST_CASE("rational coefficients round-trip as p/q strings") {
  const Json json = Json::parse(R"({"n": 1, "resources": [{"a": "1/2", "b": "2/6"}], "strategies": [[[0]]],
                                    "symmetric": true, "meta": {}})");
  const GameDocument doc = game_from_json(json);
  CHECK(doc.game.delays[0].a == Rational(1, 2));
  CHECK(doc.game.delays[0].b == Rational(1, 3));
  const Json back = game_to_json(doc);
  CHECK(back.at("resources").at(0).at("a") == "1/2");
  CHECK(back.at("resources").at(0).at("b") == "1/3");
  CHECK(canonical_text(game_to_json(game_from_json(back))) == canonical_text(back));
  const LoadedGame loaded = load_game(doc);
  CHECK(loaded.scale == 6);
  CHECK(loaded.game.delay(0) == Delay{3, 2});
}

TEST_CASE("malformed game files are rejected") {
  const auto parse = [](const char* text) { return game_from_json(Json::parse(text)); };
  CHECK_THROWS_AS(parse(R"({"n": 2, "resources": [{"a": 1, "b": 0}], "strategies": [[[0]]], "symmetric": true})"),
                  FormatError);
  CHECK_THROWS_AS(parse(R"({"n": 2, "resources": [{"a": 1, "b": 0}, {"a": 1, "b": 0}],
                            "strategies": [[[0]], [[1]]], "symmetric": true})"),
                  FormatError);
  CHECK_THROWS_AS(parse(R"({"n": 1, "resources": [{"a": "x", "b": 0}], "strategies": [[[0]]]})"), FormatError);
  CHECK_NOTHROW(parse(R"({"n": 1, "resources": [{"a": 1, "b": 0}], "strategies": [[[0]]]})"));
}

TEST_CASE("duplicate strategies are dropped on load with a warning") {
  const GameDocument doc =
      game_from_json(Json::parse(R"({"n": 1, "resources": [{"a": 1, "b": 0}, {"a": 1, "b": 1}],
                                     "strategies": [[[0, 1], [1, 0], [1]]], "symmetric": true})"));
  const LoadedGame loaded = load_game(doc);
  CHECK(loaded.game.strategies(0).size() == 2);
  CHECK(loaded.warnings.size() == 1);
}

TEST_CASE("property: random games round-trip through files") {
  const auto dir = scratch_dir("roundtrip");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomGameSpec spec;
    spec.symmetric = seed % 3 == 0;
    const CongestionGame g = random_game(spec, seed);
    const auto path = dir / ("g" + std::to_string(seed) + ".json");
    write_text_file(path, canonical_text(game_to_json(g)));
    const LoadedGame loaded = read_game_file(path);
    CHECK(loaded.scale == 1);
    CHECK(loaded.game.delays() == g.delays());
    CHECK(loaded.game.strategy_sets() == g.strategy_sets());
    CHECK(game_hash(loaded.game) == game_hash(g));
  }
}

TEST_CASE("game hash") {
  const CongestionGame g({Delay{1, 0}}, {{{0}}});
  CHECK(game_hash(g) == "0cb92dec8a8e2a05c19089febd78ca7623c8a8b009da0ae32b2da1377c999774");
  CHECK(game_hash(g) != game_hash(CongestionGame({Delay{1, 1}}, {{{0}}})));
}

TEST_CASE("trace CSV round-trip and replay") {
  const CongestionGame g = random_game({}, 11);
  const StrategyProfile start = random_profile(g, 3);
  const MoveTrace trace = run_dynamics(g, start, RandomFair{{6, 2}, 5}, 3);
  const std::string text = trace_csv(trace);
  CHECK(text.rfind(std::string(kTraceHeader) + "\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 18);
  std::istringstream in(text);
  const MoveTrace back = read_trace_csv(in, start, 6, Mode::Strict);
  CHECK(trace_csv(back) == text);
  verify_trace_replay(g, back);
  CHECK(oracle::social_cost(g, back.final_profile()) == trace.moves.back().social_cost);

  std::string broken = text;
  broken.replace(broken.find("\n1,") + 1, 1, "5");
  std::istringstream bad(broken);
  CHECK_THROWS_AS(read_trace_csv(bad, start, 6, Mode::Strict), FormatError);
}

TEST_CASE("trace sidecar") {
  const auto dir = scratch_dir("sidecar");
  const CongestionGame g = random_game({}, 12);
  const MoveTrace trace = run_dynamics(g, StrategyProfile::uniform(g.num_players(), 0), RoundRobin{}, 2);
  TraceMeta meta;
  meta.seed = 9;
  meta.policy = "round-robin";
  meta.T = g.num_players();
  meta.game_hash = game_hash(g);
  meta.initial = trace.initial;
  meta.coverings = 2;
  const auto csv = dir / "trace.csv";
  write_text_file(csv, trace_csv(trace));
  write_text_file(sidecar_path(csv), canonical_text(trace_meta_to_json(meta)));
  CHECK(sidecar_path(csv).filename() == "trace.csv.meta.json");
  const auto [loaded, loaded_meta] = read_trace_files(csv);
  CHECK(loaded_meta.seed == std::optional<std::uint64_t>(9));
  CHECK(loaded_meta.game_hash == meta.game_hash);
  CHECK(loaded_meta.T == meta.T);
  CHECK(loaded.moves.size() == trace.moves.size());
  CHECK(loaded.covering_length == g.num_players());
  CHECK(trace_csv(loaded) == trace_csv(trace));
}

TEST_CASE("schedule documents round-trip") {
  ScheduleDocument doc{StrategyProfile({1, 0, 2}), Scripted{{{0, 1}, {2, 0}, {1, 1}}}, 1, {{"kind", "test"}}};
  const Json json = schedule_to_json(doc);
  const ScheduleDocument back = schedule_from_json(json);
  CHECK(back.initial == doc.initial);
  CHECK(back.script.steps == doc.script.steps);
  CHECK(back.coverings == 1);
  CHECK(back.meta == doc.meta);
  CHECK(canonical_text(schedule_to_json(back)) == canonical_text(json));
}
