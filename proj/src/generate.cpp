#include "cdl/generate.hpp"

#include "cdl/random.hpp"

#include <algorithm>
#include <numeric>

namespace cdl {

void RandomGameSpec::validate() const {
  if (players == 0) throw ValidationError("random game needs at least one player");
  if (resources == 0) throw ValidationError("random game needs at least one resource");
  if (resources > 63) throw ValidationError("random game supports at most 63 resources");
  if (max_strategies == 0) throw ValidationError("max_strategies must be at least 1");
  if (max_strategy_size > resources) throw ValidationError("max_strategy_size exceeds the resource count");
  if (max_a < 0 || max_b < 0) throw ValidationError("coefficient bounds must be nonnegative");
}

namespace {

std::vector<Strategy> draw_strategies(const RandomGameSpec& spec, Rng& rng) {
  const std::size_t cap = spec.max_strategy_size == 0 ? spec.resources : spec.max_strategy_size;
  // distinct subsets available with sizes 1..cap bound the draw count
  std::uint64_t available = 0;
  std::uint64_t binom = 1;
  for (std::size_t k = 1; k <= cap; ++k) {
    binom = binom * (spec.resources - k + 1) / k;
    available += binom;
    if (available >= spec.max_strategies) break;
  }
  const std::size_t count =
      1 + static_cast<std::size_t>(uniform_below(rng, std::min<std::uint64_t>(spec.max_strategies, available)));
  std::vector<Strategy> out;
  std::vector<ResourceId> ids(spec.resources);
  while (out.size() < count) {
    const std::size_t size = 1 + static_cast<std::size_t>(uniform_below(rng, cap));
    std::iota(ids.begin(), ids.end(), ResourceId{0});
    for (std::size_t k = 0; k < size; ++k) {
      const std::size_t pick = k + static_cast<std::size_t>(uniform_below(rng, ids.size() - k));
      std::swap(ids[k], ids[pick]);
    }
    Strategy s(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(s.begin(), s.end());
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

CongestionGame random_game(const RandomGameSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  std::vector<Delay> delays(spec.resources);
  for (Delay& d : delays) {
    d.a = static_cast<Cost>(uniform_below(rng, static_cast<std::uint64_t>(spec.max_a) + 1));
    d.b = static_cast<Cost>(uniform_below(rng, static_cast<std::uint64_t>(spec.max_b) + 1));
  }
  std::vector<std::vector<Strategy>> sets;
  if (spec.symmetric) {
    sets.assign(spec.players, draw_strategies(spec, rng));
  } else {
    for (std::size_t i = 0; i < spec.players; ++i) sets.push_back(draw_strategies(spec, rng));
  }
  return CongestionGame(std::move(delays), std::move(sets));
}

StrategyProfile random_profile(const CongestionGame& game, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<StrategyIndex> choices(game.num_players());
  for (PlayerId i = 0; i < choices.size(); ++i)
    choices[i] = static_cast<StrategyIndex>(uniform_below(rng, game.strategies(i).size()));
  return StrategyProfile(std::move(choices));
}

}  // namespace cdl
