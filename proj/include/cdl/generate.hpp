#pragma once

#include "cdl/game.hpp"

#include <cstdint>

namespace cdl {

struct RandomGameSpec {
  std::size_t players = 4;
  std::size_t resources = 6;
  std::size_t max_strategies = 4;  // per player, at least 1
  std::size_t max_strategy_size = 0;  // 0 means up to every resource
  Cost max_a = 3;
  Cost max_b = 3;
  bool symmetric = false;

  void validate() const;
};

/// Each player draws 1..max_strategies distinct nonempty resource subsets;
/// a symmetric game draws one list and hands it to every player. Coefficients
/// are uniform in [0, max_a] × [0, max_b]. Deterministic in the seed.
CongestionGame random_game(const RandomGameSpec& spec, std::uint64_t seed);

/// A uniformly random profile.
StrategyProfile random_profile(const CongestionGame& game, std::uint64_t seed);

}  // namespace cdl
