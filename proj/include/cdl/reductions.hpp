#pragma once

#include "cdl/game.hpp"
#include "cdl/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cdl {

inline constexpr std::size_t kDefaultResourceCap = 1'000'000;

/// Delay coefficients before integer scaling.
struct RationalDelay {
  Rational a = 0;
  Rational b = 0;
};

struct RationalGame {
  std::vector<RationalDelay> delays;
  std::vector<std::vector<Strategy>> strategy_sets;
};

struct ScaledGame {
  CongestionGame game;
  /// LCM of all coefficient denominators; every cost is multiplied by it.
  BigInt factor;
};

/// Multiplies every coefficient by the LCM of the denominators. Throws
/// ValidationError for negative coefficients or scaled values beyond int64.
ScaledGame scale_coefficients(const RationalGame& game, EmptyStrategies empty = EmptyStrategies::Reject);

RationalGame to_rational(const CongestionGame& game);

enum class CopyKind { A, B };

/// Where a target resource comes from: one of the a_e copies A_e, or one of
/// the b_e copies in B^owner_e.
struct ResourceOrigin {
  ResourceId source;
  CopyKind kind;
  PlayerId owner;  // B copies only
};

/// Best-response reduction to an identity-delay game. For the asymmetric
/// construction player i's strategy k maps to target strategy k; for the
/// symmetric one every player shares copies s'_{k,j} (index k·n + j) and
/// player i's strategy k maps to s'_{k,i}.
class ReductionMap {
 public:
  ReductionMap(CongestionGame source, CongestionGame target, std::vector<ResourceOrigin> provenance, bool symmetric);

  const CongestionGame& source() const { return source_; }
  const CongestionGame& target() const { return target_; }
  const std::vector<ResourceOrigin>& provenance() const { return provenance_; }
  bool symmetric() const { return symmetric_; }

  StrategyIndex map_strategy(PlayerId i, StrategyIndex k) const;
  StrategyProfile map_profile(const StrategyProfile& profile) const;

  /// For the symmetric reduction: no B^k_e set is used by two players at once.
  /// Returns a description of the first clash, if any.
  std::optional<std::string> b_set_clash(const StrategyProfile& target_profile) const;

 private:
  CongestionGame source_;
  CongestionGame target_;
  std::vector<ResourceOrigin> provenance_;
  bool symmetric_;
};

/// Each resource e becomes a_e identity resources A_e plus n sets B^i_e of
/// b_e identity resources; s'_i = ∪_{e∈s_i} A_e ∪ B^i_e.
ReductionMap reduce_to_identity(const CongestionGame& game, std::size_t resource_cap = kDefaultResourceCap);

/// Symmetric variant; throws ValidationError for non-symmetric sources.
ReductionMap reduce_to_identity_symmetric(const CongestionGame& game, std::size_t resource_cap = kDefaultResourceCap);

struct ReductionMismatch {
  StrategyProfile profile;  // source profile where the maps disagree
  PlayerId player;
  std::vector<Cost> source_costs;  // cost of every source strategy for the player
  std::vector<Cost> target_costs;  // cost of the mapped target strategies
  std::string reason;
};

struct ReductionReport {
  std::size_t steps = 0;
  std::size_t profiles_checked = 0;
  std::size_t nash_profiles = 0;
  std::vector<ReductionMismatch> mismatches;
  bool ok() const { return mismatches.empty(); }
};

/// Replays random best-response dynamics in source and target in lockstep
/// (`num_traces` runs of `steps_per_trace` moves from random starts) and
/// checks cost equality, best-response correspondence, Nash equivalence and,
/// for symmetric maps, B-set disjointness at every visited profile.
ReductionReport verify_reduction(const ReductionMap& map, std::size_t num_traces, std::uint64_t seed,
                                 std::size_t steps_per_trace = 1000);

}  // namespace cdl
