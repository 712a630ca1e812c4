#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cdl {

using ResourceId = std::uint32_t;
using PlayerId = std::size_t;
using StrategyIndex = std::uint32_t;
using Cost = std::int64_t;

/// A strategy is a sorted, duplicate-free list of resources.
using Strategy = std::vector<ResourceId>;

/// Raised for malformed games, profiles and illegal moves.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Affine delay f(x) = a*x + b with nonnegative integer coefficients.
struct Delay {
  Cost a = 0;
  Cost b = 0;

  constexpr Cost operator()(Cost load) const { return a * load + b; }
  friend bool operator==(const Delay&, const Delay&) = default;
};

enum class EmptyStrategies { Reject, Allow };

/// A linear congestion game with explicit strategy sets. Immutable after
/// construction; every invariant is checked by the constructor.
class CongestionGame {
 public:
  /// Strategies are normalized (sorted, repeated resources collapsed).
  /// Duplicate strategies within a player's set are kept; use
  /// deduplicate_strategies() when loading untrusted input.
  CongestionGame(std::vector<Delay> delays,
                 std::vector<std::vector<Strategy>> strategy_sets,
                 EmptyStrategies empty = EmptyStrategies::Reject);

  std::size_t num_players() const { return strategy_sets_.size(); }
  std::size_t num_resources() const { return delays_.size(); }

  const Delay& delay(ResourceId e) const { return delays_[e]; }
  const std::vector<Delay>& delays() const { return delays_; }

  const std::vector<Strategy>& strategies(PlayerId i) const { return strategy_sets_[i]; }
  const Strategy& strategy(PlayerId i, StrategyIndex k) const { return strategy_sets_[i][k]; }
  const std::vector<std::vector<Strategy>>& strategy_sets() const { return strategy_sets_; }

  /// True iff all players share the same set of strategies (compared as sets).
  bool is_symmetric() const { return symmetric_; }

  /// True iff every delay is f(x) = x.
  bool has_identity_delays() const { return identity_; }

  /// Number of strategy profiles, saturating at UINT64_MAX.
  std::uint64_t profile_space_size() const;

 private:
  std::vector<Delay> delays_;
  std::vector<std::vector<Strategy>> strategy_sets_;
  bool symmetric_ = false;
  bool identity_ = false;
};

/// Removes repeated strategies (keeping the first occurrence) and returns one
/// warning line per removed duplicate.
std::pair<CongestionGame, std::vector<std::string>> deduplicate_strategies(const CongestionGame& game);

/// One strategy index per player.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  explicit StrategyProfile(std::vector<StrategyIndex> choices) : choices_(std::move(choices)) {}

  /// Every player on strategy `index`.
  static StrategyProfile uniform(std::size_t players, StrategyIndex index = 0) {
    return StrategyProfile(std::vector<StrategyIndex>(players, index));
  }

  std::size_t size() const { return choices_.size(); }
  StrategyIndex operator[](PlayerId i) const { return choices_[i]; }
  void set(PlayerId i, StrategyIndex k) { choices_[i] = k; }
  const std::vector<StrategyIndex>& choices() const { return choices_; }

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;

 private:
  std::vector<StrategyIndex> choices_;
};

/// Throws ValidationError naming the first offending player.
void validate_profile(const CongestionGame& game, const StrategyProfile& profile);

/// n_e(S) for every resource.
using CongestionVector = std::vector<Cost>;

CongestionVector congestion_vector(const CongestionGame& game, const StrategyProfile& profile);

Cost player_cost(const CongestionGame& game, const StrategyProfile& profile, PlayerId i);
Cost social_cost(const CongestionGame& game, const StrategyProfile& profile);
Cost potential(const CongestionGame& game, const StrategyProfile& profile);

/// Σ_e n_e f_e(n_e) and Σ_e Σ_{j≤n_e} f_e(j) from a precomputed load vector.
Cost social_cost_from_loads(const CongestionGame& game, std::span<const Cost> loads);
Cost potential_from_loads(const CongestionGame& game, std::span<const Cost> loads);

/// Cost of `strategy` for a player currently on `current`, when the loads
/// include that player on `current`.
Cost deviation_cost(const CongestionGame& game, std::span<const Cost> loads, const Strategy& current,
                    const Strategy& strategy);

/// Cost of a player on `strategy` when `loads` already include that player.
Cost strategy_cost(const CongestionGame& game, std::span<const Cost> loads, const Strategy& strategy);

struct KeepCurrent {};
struct LowestIndex {};
struct Prefer {
  StrategyIndex index;
};
/// Tie-breaking among strict improvers. All policies first apply the rule
/// that a player with no strictly improving strategy keeps its current one,
/// so KeepCurrent and LowestIndex only differ in name.
using TiePolicy = std::variant<KeepCurrent, LowestIndex, Prefer>;

struct BestResponse {
  StrategyIndex index;
  bool improving;
  Cost current_cost;
  Cost best_cost;
};

/// Throws ValidationError if a Prefer target does not attain the minimum.
BestResponse best_response(const CongestionGame& game, const StrategyProfile& profile, PlayerId i,
                           TiePolicy policy = KeepCurrent{});

/// Same, reusing the caller's load vector for `profile`.
BestResponse best_response(const CongestionGame& game, const StrategyProfile& profile,
                           std::span<const Cost> loads, PlayerId i, TiePolicy policy = KeepCurrent{});

enum class MoveFlag { Improving, Indifferent, Stay };

const char* to_string(MoveFlag flag);
std::optional<MoveFlag> parse_move_flag(std::string_view text);

struct SwitchResult {
  StrategyProfile profile;
  MoveFlag flag;
  Cost pre_cost;
  Cost post_cost;
  /// Whether strict best-response dynamics would have produced this move.
  bool strict_legal;
};

/// Moves player i to `target` provided that does not raise its cost; throws
/// ValidationError for a strictly worsening target.
SwitchResult indifferent_switch(const CongestionGame& game, const StrategyProfile& profile, PlayerId i,
                                StrategyIndex target);

}  // namespace cdl
