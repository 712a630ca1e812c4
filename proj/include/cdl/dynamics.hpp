#pragma once

#include "cdl/game.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace cdl {

/// (T, beta): coverings of T moves in which every player moves at least once
/// and at most beta times.
struct FairnessSpec {
  std::size_t T = 1;
  std::size_t beta = 1;

  /// Throws ValidationError unless n <= T and 1 <= beta <= T.
  void validate(std::size_t players) const;
};

enum class Mode {
  /// Only best responses; a scheduled player already at a best response stays.
  Strict,
  /// Scripted moves may switch between equal-cost strategies.
  Permissive,
};

const char* to_string(Mode mode);

struct Move {
  std::size_t step = 0;  // 0-based position in the trace
  PlayerId player = 0;
  StrategyIndex previous = 0;
  StrategyIndex strategy = 0;
  Cost pre_cost = 0;
  Cost post_cost = 0;
  MoveFlag flag = MoveFlag::Stay;
  Cost social_cost = 0;  // C after the move
  Cost potential = 0;    // Φ after the move
};

struct MoveTrace {
  StrategyProfile initial;
  std::vector<Move> moves;
  std::size_t covering_length = 1;
  Mode mode = Mode::Strict;

  std::size_t num_coverings() const { return moves.size() / covering_length; }
  /// Profile after the first `steps` moves.
  StrategyProfile profile_after(std::size_t steps) const;
  StrategyProfile final_profile() const { return profile_after(moves.size()); }
};

struct RoundRobin {
  /// Permutation of the players; empty means 0..n-1.
  std::vector<PlayerId> order;
};

struct RandomFair {
  FairnessSpec spec;
  std::uint64_t seed = 0;
};

struct ScriptStep {
  PlayerId player;
  StrategyIndex strategy;
  friend bool operator==(const ScriptStep&, const ScriptStep&) = default;
};

struct Scripted {
  std::vector<ScriptStep> steps;
};

using SchedulePolicy = std::variant<RoundRobin, RandomFair, Scripted>;

/// Runs num_coverings coverings of the policy's covering length (n for
/// RoundRobin, T for RandomFair, |steps|/num_coverings for Scripted).
/// Throws ValidationError when a scripted move is illegal for the mode.
MoveTrace run_dynamics(const CongestionGame& game, const StrategyProfile& initial, const SchedulePolicy& policy,
                       std::size_t num_coverings, Mode mode = Mode::Strict, TiePolicy tie = KeepCurrent{});

/// The player sequence RandomFair emits, exposed for testing the sampler
/// separately from the game.
std::vector<PlayerId> random_fair_schedule(std::size_t players, const FairnessSpec& spec, std::uint64_t seed,
                                           std::size_t num_coverings);

struct CoveringCheck {
  std::vector<PlayerId> idle_players;                              // liveness violations
  std::vector<std::pair<PlayerId, std::size_t>> overactive_players;  // (player, moves) above beta
  bool ok() const { return idle_players.empty() && overactive_players.empty(); }
};

struct CoveringValidationReport {
  std::vector<CoveringCheck> coverings;
  bool valid() const;
};

/// Throws ValidationError if the trace length is not a multiple of spec.T.
CoveringValidationReport validate_fairness(const MoveTrace& trace, std::size_t players, const FairnessSpec& spec);

struct CoveringView {
  std::size_t begin = 0;  // global index of the covering's first move
  std::size_t length = 0;
  StrategyProfile start;  // S^0
  StrategyProfile end;    // S^T
  std::vector<PlayerId> movers;  // π(1..T)
  /// last(i) as a 1-based position inside the covering; nullopt when i never moves.
  std::vector<std::optional<std::size_t>> last;

  bool live() const;
};

std::vector<CoveringView> covering_views(const MoveTrace& trace, std::size_t players);

/// Replays every move and checks recorded costs, social cost and potential.
/// Throws ValidationError at the first mismatch.
void verify_trace_replay(const CongestionGame& game, const MoveTrace& trace);

}  // namespace cdl
