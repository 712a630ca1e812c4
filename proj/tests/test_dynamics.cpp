#include "cdl/dynamics.hpp"
#include "cdl/generate.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace cdl;

TEST_CASE("fairness spec validation") {
  CHECK_NOTHROW((FairnessSpec{4, 1}.validate(4)));
  CHECK_THROWS_AS((FairnessSpec{3, 1}.validate(4)), ValidationError);
  CHECK_THROWS_AS((FairnessSpec{4, 0}.validate(4)), ValidationError);
  CHECK_THROWS_AS((FairnessSpec{4, 5}.validate(4)), ValidationError);
}

TEST_CASE("round robin runs n moves per covering") {
  const auto g = oracle::identity_game(2, {{{0}, {1}}, {{0}, {1}}, {{0}, {1}}});
  const MoveTrace trace = run_dynamics(g, StrategyProfile::uniform(3, 0), RoundRobin{}, 3);
  CHECK(trace.moves.size() == 9);
  CHECK(trace.covering_length == 3);
  CHECK(trace.num_coverings() == 3);
  CHECK(trace.moves[0].player == 0);
  CHECK(trace.moves[0].flag == MoveFlag::Improving);
  CHECK(trace.moves[0].strategy == 1);
  CHECK(trace.moves[1].flag == MoveFlag::Stay);
  CHECK_NOTHROW(verify_trace_replay(g, trace));

  const MoveTrace reversed = run_dynamics(g, StrategyProfile::uniform(3, 0), RoundRobin{{2, 1, 0}}, 1);
  CHECK(reversed.moves[0].player == 2);
  CHECK_THROWS_AS(run_dynamics(g, StrategyProfile::uniform(3, 0), RoundRobin{{0, 0, 1}}, 1), ValidationError);
}

TEST_CASE("random fair schedule respects liveness and beta") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 1 + seed % 7;
    const std::size_t max_beta = 1 + seed % 3;
    const std::size_t T = n + seed % (max_beta * n - n + 1);
    const std::size_t beta = std::min(max_beta, T);
    const auto schedule = random_fair_schedule(n, {T, beta}, seed, 4);
    REQUIRE(schedule.size() == 4 * T);
    for (std::size_t c = 0; c < 4; ++c) {
      std::vector<std::size_t> counts(n);
      for (std::size_t t = c * T; t < (c + 1) * T; ++t) ++counts[schedule[t]];
      for (std::size_t count : counts) {
        CHECK(count >= 1);
        CHECK(count <= beta);
      }
    }
  }
  CHECK(random_fair_schedule(5, {9, 2}, 3, 2) == random_fair_schedule(5, {9, 2}, 3, 2));
  CHECK_THROWS_AS(random_fair_schedule(3, {7, 2}, 0, 1), ValidationError);
}

TEST_CASE("random fair dynamics pass validate_fairness") {
  RandomGameSpec spec;
  spec.players = 5;
  const CongestionGame g = random_game(spec, 1);
  const MoveTrace trace = run_dynamics(g, random_profile(g, 2), RandomFair{{8, 2}, 1}, 3);
  CHECK(trace.moves.size() == 24);
  CHECK(validate_fairness(trace, 5, {8, 2}).valid());
  CHECK_NOTHROW(verify_trace_replay(g, trace));
}

TEST_CASE("validate_fairness reports idle and overactive players") {
  const auto g = oracle::identity_game(1, {{{0}}, {{0}}, {{0}}});
  const MoveTrace trace = run_dynamics(g, StrategyProfile::uniform(3, 0), Scripted{{{0, 0}, {0, 0}, {1, 0}}}, 1);
  const auto report = validate_fairness(trace, 3, {3, 1});
  REQUIRE(report.coverings.size() == 1);
  CHECK(report.coverings[0].idle_players == std::vector<PlayerId>{2});
  REQUIRE(report.coverings[0].overactive_players.size() == 1);
  CHECK(report.coverings[0].overactive_players[0].first == 0);
  CHECK(report.coverings[0].overactive_players[0].second == 2);
  CHECK_FALSE(report.valid());
  CHECK_THROWS_AS(validate_fairness(trace, 3, {2, 1}), ValidationError);
}

TEST_CASE("scripted moves in strict and permissive mode") {
  const auto g = oracle::identity_game(3, {{{0}, {1}, {2}}, {{0}}, {{1}}});
  const StrategyProfile start({0, 0, 0});
  // player 0 sits on a shared resource; the move to resource 1 is equal cost
  const Scripted sideways{{{0, 1}}};
  CHECK_THROWS_AS(run_dynamics(g, start, sideways, 1, Mode::Strict), ValidationError);
  const MoveTrace perm = run_dynamics(g, start, sideways, 1, Mode::Permissive);
  CHECK(perm.moves[0].flag == MoveFlag::Indifferent);
  CHECK(perm.moves[0].pre_cost == perm.moves[0].post_cost);

  const MoveTrace strict = run_dynamics(g, start, Scripted{{{0, 2}}}, 1, Mode::Strict);
  CHECK(strict.moves[0].flag == MoveFlag::Improving);
  CHECK_THROWS_AS(run_dynamics(g, StrategyProfile({2, 0, 0}), Scripted{{{0, 0}}}, 1, Mode::Permissive), ValidationError);
  CHECK_THROWS_AS(run_dynamics(g, start, Scripted{{{0, 2}, {1, 0}, {2, 0}}}, 2), ValidationError);
}

TEST_CASE("covering views expose last(i)") {
  const auto g = oracle::identity_game(2, {{{0}, {1}}, {{0}, {1}}});
  const MoveTrace trace = run_dynamics(g, StrategyProfile::uniform(2, 0), Scripted{{{0, 1}, {1, 0}, {0, 1}, {0, 1}}}, 2);
  const auto views = covering_views(trace, 2);
  REQUIRE(views.size() == 2);
  CHECK(views[0].last[0] == 1);
  CHECK(views[0].last[1] == 2);
  CHECK(views[0].live());
  CHECK(views[0].end == StrategyProfile({1, 0}));
  CHECK(views[1].start == views[0].end);
  CHECK_FALSE(views[1].last[1].has_value());
  CHECK_FALSE(views[1].live());
}

TEST_CASE("trace replay detects tampering") {
  const auto g = oracle::identity_game(2, {{{0}, {1}}, {{0}, {1}}});
  MoveTrace trace = run_dynamics(g, StrategyProfile::uniform(2, 0), RoundRobin{}, 2);
  CHECK_NOTHROW(verify_trace_replay(g, trace));
  trace.moves[1].social_cost += 1;
  CHECK_THROWS_AS(verify_trace_replay(g, trace), ValidationError);
}

TEST_CASE("property: recorded social cost and potential match a fresh recomputation") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    RandomGameSpec spec;
    spec.players = 2 + seed % 5;
    spec.resources = 3 + seed % 4;
    spec.symmetric = seed % 2 == 0;
    const CongestionGame g = random_game(spec, seed);
    const std::size_t T = spec.players + seed % spec.players;
    const MoveTrace trace = run_dynamics(g, random_profile(g, seed), RandomFair{{T, 2}, seed}, 3);
    StrategyProfile s = trace.initial;
    for (const Move& m : trace.moves) {
      CHECK(m.pre_cost == oracle::player_cost(g, s, m.player));
      s.set(m.player, m.strategy);
      CHECK(m.post_cost == oracle::player_cost(g, s, m.player));
      CHECK(m.social_cost == oracle::social_cost(g, s));
      CHECK(m.potential == oracle::potential(g, s));
      CHECK(m.post_cost <= m.pre_cost);
    }
  }
}
