#pragma once

#include "cdl/dynamics.hpp"
#include "cdl/game.hpp"
#include "cdl/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cdl {

/// Parameters of the leveled blocking game G′.
struct LowerBoundParams {
  std::size_t beta = 16;  // power of two, at least 16
  std::size_t L = 1;      // levels 0..L
  std::uint64_t m = 0;    // main resources per level

  std::size_t address_bits() const;
  /// f_i = max(2, ⌊(β/log₂β)^(1−1/2^(i+1))⌋), computed exactly.
  std::size_t f(std::size_t level) const;
  /// Throws ValidationError naming the first violated constraint.
  void validate() const;

  /// Smallest m divisible by β^(L+1) and by every β^i·f_i.
  static std::uint64_t smallest_feasible_m(std::size_t beta, std::size_t L);
};

/// β = the largest power of two with β² ≤ n_target, L = 1, smallest feasible m.
LowerBoundParams corollary_params(std::size_t n_target);

enum class Role { P, Q, R };

const char* to_string(Role role);

struct Triplet {
  PlayerId p, q, r;
};

/// Players and resources of block (level, block). `block` and the triplet
/// number k are 1-based as in the construction; vectors are indexed by k−1.
struct BlockLayout {
  std::size_t level = 0;
  std::size_t block = 1;
  std::vector<Triplet> triplets;
  ResourceId main_begin = 0;
  std::uint64_t main_count = 0;
  ResourceId address_begin = 0;
  ResourceId t_begin = 0;
  std::size_t bits = 0;
  std::size_t beta = 0;

  ResourceId main(std::uint64_t index) const { return main_begin + static_cast<ResourceId>(index); }
  ResourceId q(std::size_t k, std::size_t l, unsigned bit) const { return address(k, l, 0, bit); }
  ResourceId r(std::size_t k, std::size_t l, unsigned bit) const { return address(k, l, 1, bit); }
  ResourceId t(std::size_t k, std::size_t alpha) const {
    return t_begin + static_cast<ResourceId>((k - 1) * beta + (alpha - 1));
  }

 private:
  ResourceId address(std::size_t k, std::size_t l, unsigned kind, unsigned bit) const {
    return address_begin + static_cast<ResourceId>((((k - 1) * bits + l) * 2 + kind) * 2 + bit);
  }
};

struct PlayerInfo {
  std::size_t level;
  std::size_t block;  // 1-based
  std::size_t k;      // 1-based
  Role role;
};

struct LowerBoundInstance {
  LowerBoundParams params;
  std::vector<std::size_t> f;  // f_0..f_L
  CongestionGame game;
  std::vector<std::vector<BlockLayout>> levels;  // levels[i][j−1]
  std::vector<PlayerInfo> players;
  StrategyProfile initial;  // every player on s_β
  BigInt scale = 1;         // integer scaling applied to the delays

  const BlockLayout& block(std::size_t level, std::size_t j) const { return levels.at(level).at(j - 1); }
  /// D_i = m/β^(i+1): unit of the t delays and per-block main load.
  Cost unit(std::size_t level) const;
  /// Delay of a P player before and after each scripted move: D_i·f_i·(1 + bits).
  Cost p_move_delay(std::size_t level) const;
  /// Every player on s_0.
  StrategyProfile all_s0() const;
};

/// Strategy index α ∈ {0..β} is s_α. Delays: main f(x) = x; address
/// f(x) = D_i·f_i·x; t resources constant. Level-L P strategies carry only
/// their t and address resources.
LowerBoundInstance build_gprime(const LowerBoundParams& params);

struct RunMove {
  ScriptStep step;
  std::size_t alpha;
};

struct LowerBoundSchedule {
  std::vector<RunMove> run;  // the recursive run alone
  Scripted script;           // run plus stay-moves, split into coverings
  std::size_t coverings = 1;
  std::size_t covering_length = 0;
  /// Largest number of scheduled steps of one player inside one covering.
  std::size_t max_moves_per_covering = 0;
  /// Largest number of strategy changes of one player over the whole run.
  std::size_t max_run_moves = 0;
};

/// The recursive run started at the level-0 block, cut into `coverings`
/// consecutive chunks. Every chunk is followed by one stay-move for each
/// player that does not move in it, and shorter chunks are padded with stays
/// by level-L players so all coverings have equal length.
LowerBoundSchedule build_algorithm1_schedule(const LowerBoundInstance& instance, std::size_t coverings = 1);

struct ClaimViolation {
  std::size_t step;  // number of moves applied before the checked state
  std::string what;
};

struct BlockingReport {
  std::size_t p_moves = 0;
  std::size_t checkpoints = 0;           // states where a whole P group sits on one s_α
  std::size_t deviation_checks = 0;      // (move, α′) pairs examined
  std::size_t blocked_s0_checks = 0;     // players whose blocked s_0 was examined
  std::vector<ClaimViolation> equal_delay;      // P move not at D_i·f_i·(1+bits) before and after
  std::vector<ClaimViolation> deviation;        // s_α′ with α′ ∉ {α, α+1} not strictly worse
  std::vector<ClaimViolation> congestion;       // blocked main resource with load below f_i
  std::vector<ClaimViolation> blocked_s0;       // blocked s_0 not strictly worse than the move delay
  std::vector<ClaimViolation> dominance;        // β·f_(i−1) > f_i²·log₂β fails for some level
  std::vector<ClaimViolation> worsening;        // a scripted move raised the mover's cost

  bool ok() const {
    return equal_delay.empty() && deviation.empty() && congestion.empty() && blocked_s0.empty() &&
           dominance.empty() && worsening.empty();
  }
};

/// Replays the trace and checks the blocking claims, the equal-delay
/// property of P moves and the strict dominance of every other s_α′.
BlockingReport verify_blocking_claim(const LowerBoundInstance& instance, const MoveTrace& trace);

struct OptReference {
  Cost value = 0;
  /// True when certified by exhaustive search.
  bool exact = false;
};

/// C(all s_0): the reference optimum for instances too large to enumerate.
OptReference all_s0_reference(const LowerBoundInstance& instance);

struct TrajectoryPoint {
  std::size_t step;  // moves applied
  Cost social_cost;
  Rational ratio;
};

struct RatioTrajectory {
  std::vector<TrajectoryPoint> points;  // initial state first
  std::vector<Cost> level_costs;        // Σ of player costs per level in the final state
  Rational floor;                       // f_(L−1) / (3(L+1))
  Rational min_ratio;
  bool holds = false;
  bool advisory = true;
};

RatioTrajectory ratio_trajectory(const LowerBoundInstance& instance, const MoveTrace& trace, const OptReference& opt);

/// Σ_e f_e(n_e(S)) over used resources.
Cost delay_mass(const CongestionGame& game, const StrategyProfile& profile);

}  // namespace cdl
