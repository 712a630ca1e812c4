#include "cdl/game.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace cdl {

namespace {

std::set<Strategy> as_set(const std::vector<Strategy>& strategies) {
  return {strategies.begin(), strategies.end()};
}

}  // namespace

CongestionGame::CongestionGame(std::vector<Delay> delays, std::vector<std::vector<Strategy>> strategy_sets,
                               EmptyStrategies empty)
    : delays_(std::move(delays)), strategy_sets_(std::move(strategy_sets)) {
  if (strategy_sets_.empty()) throw ValidationError("game needs at least one player");
  for (std::size_t e = 0; e < delays_.size(); ++e) {
    if (delays_[e].a < 0 || delays_[e].b < 0)
      throw ValidationError("resource " + std::to_string(e) + " has a negative delay coefficient");
  }
  for (std::size_t i = 0; i < strategy_sets_.size(); ++i) {
    auto& set = strategy_sets_[i];
    if (set.empty()) throw ValidationError("player " + std::to_string(i) + " has no strategies");
    for (std::size_t k = 0; k < set.size(); ++k) {
      auto& s = set[k];
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      if (s.empty() && empty == EmptyStrategies::Reject)
        throw ValidationError("player " + std::to_string(i) + " strategy " + std::to_string(k) + " is empty");
      if (!s.empty() && s.back() >= delays_.size())
        throw ValidationError("player " + std::to_string(i) + " strategy " + std::to_string(k) +
                              " uses unknown resource " + std::to_string(s.back()));
    }
  }
  identity_ = std::all_of(delays_.begin(), delays_.end(), [](const Delay& d) { return d.a == 1 && d.b == 0; });
  const auto first = as_set(strategy_sets_.front());
  symmetric_ = std::all_of(strategy_sets_.begin() + 1, strategy_sets_.end(),
                           [&](const auto& set) { return as_set(set) == first; });
}

std::uint64_t CongestionGame::profile_space_size() const {
  std::uint64_t total = 1;
  for (const auto& set : strategy_sets_) {
    if (total > std::numeric_limits<std::uint64_t>::max() / set.size()) return std::numeric_limits<std::uint64_t>::max();
    total *= set.size();
  }
  return total;
}

std::pair<CongestionGame, std::vector<std::string>> deduplicate_strategies(const CongestionGame& game) {
  std::vector<std::string> warnings;
  std::vector<std::vector<Strategy>> sets;
  sets.reserve(game.num_players());
  for (PlayerId i = 0; i < game.num_players(); ++i) {
    std::vector<Strategy> kept;
    std::set<Strategy> seen;
    const auto& strategies = game.strategies(i);
    for (std::size_t k = 0; k < strategies.size(); ++k) {
      if (seen.insert(strategies[k]).second) {
        kept.push_back(strategies[k]);
      } else {
        warnings.push_back("player " + std::to_string(i) + ": dropped duplicate strategy " + std::to_string(k));
      }
    }
    sets.push_back(std::move(kept));
  }
  return {CongestionGame(game.delays(), std::move(sets), EmptyStrategies::Allow), std::move(warnings)};
}

void validate_profile(const CongestionGame& game, const StrategyProfile& profile) {
  if (profile.size() != game.num_players())
    throw ValidationError("profile has " + std::to_string(profile.size()) + " entries, game has " +
                          std::to_string(game.num_players()) + " players");
  for (PlayerId i = 0; i < profile.size(); ++i) {
    if (profile[i] >= game.strategies(i).size())
      throw ValidationError("player " + std::to_string(i) + " uses strategy index " + std::to_string(profile[i]) +
                            " but has only " + std::to_string(game.strategies(i).size()));
  }
}

CongestionVector congestion_vector(const CongestionGame& game, const StrategyProfile& profile) {
  validate_profile(game, profile);
  CongestionVector loads(game.num_resources(), 0);
  for (PlayerId i = 0; i < profile.size(); ++i) {
    for (ResourceId e : game.strategy(i, profile[i])) ++loads[e];
  }
  return loads;
}

Cost strategy_cost(const CongestionGame& game, std::span<const Cost> loads, const Strategy& strategy) {
  Cost total = 0;
  for (ResourceId e : strategy) total += game.delay(e)(loads[e]);
  return total;
}

Cost deviation_cost(const CongestionGame& game, std::span<const Cost> loads, const Strategy& current,
                    const Strategy& strategy) {
  Cost total = 0;
  auto it = current.begin();
  for (ResourceId e : strategy) {
    while (it != current.end() && *it < e) ++it;
    const bool shared = it != current.end() && *it == e;
    total += game.delay(e)(loads[e] + (shared ? 0 : 1));
  }
  return total;
}

Cost player_cost(const CongestionGame& game, const StrategyProfile& profile, PlayerId i) {
  const auto loads = congestion_vector(game, profile);
  return strategy_cost(game, loads, game.strategy(i, profile[i]));
}

Cost social_cost_from_loads(const CongestionGame& game, std::span<const Cost> loads) {
  Cost total = 0;
  for (ResourceId e = 0; e < loads.size(); ++e) total += loads[e] * game.delay(e)(loads[e]);
  return total;
}

Cost potential_from_loads(const CongestionGame& game, std::span<const Cost> loads) {
  Cost total = 0;
  for (ResourceId e = 0; e < loads.size(); ++e) {
    const Delay& d = game.delay(e);
    const Cost n = loads[e];
    total += d.a * n * (n + 1) / 2 + d.b * n;
  }
  return total;
}

Cost social_cost(const CongestionGame& game, const StrategyProfile& profile) {
  return social_cost_from_loads(game, congestion_vector(game, profile));
}

Cost potential(const CongestionGame& game, const StrategyProfile& profile) {
  return potential_from_loads(game, congestion_vector(game, profile));
}

BestResponse best_response(const CongestionGame& game, const StrategyProfile& profile, PlayerId i,
                           TiePolicy policy) {
  const auto loads = congestion_vector(game, profile);
  return best_response(game, profile, loads, i, policy);
}

BestResponse best_response(const CongestionGame& game, const StrategyProfile& profile,
                           std::span<const Cost> loads, PlayerId i, TiePolicy policy) {
  const auto& strategies = game.strategies(i);
  const Strategy& current = strategies[profile[i]];
  const Cost current_cost = strategy_cost(game, loads, current);

  Cost best = current_cost;
  StrategyIndex best_index = profile[i];
  for (StrategyIndex k = 0; k < strategies.size(); ++k) {
    if (k == profile[i]) continue;
    const Cost cost = deviation_cost(game, loads, current, strategies[k]);
    if (cost < best) {
      best = cost;
      best_index = k;
    }
  }

  if (const auto* prefer = std::get_if<Prefer>(&policy)) {
    if (prefer->index >= strategies.size())
      throw ValidationError("player " + std::to_string(i) + ": preferred strategy " +
                            std::to_string(prefer->index) + " does not exist");
    const Cost preferred = prefer->index == profile[i]
                               ? current_cost
                               : deviation_cost(game, loads, current, strategies[prefer->index]);
    if (preferred != best)
      throw ValidationError("player " + std::to_string(i) + ": preferred strategy " +
                            std::to_string(prefer->index) + " costs " + std::to_string(preferred) +
                            ", best response costs " + std::to_string(best));
    if (best < current_cost) best_index = prefer->index;
  }
  return {best_index, best < current_cost, current_cost, best};
}

const char* to_string(MoveFlag flag) {
  switch (flag) {
    case MoveFlag::Improving: return "improving";
    case MoveFlag::Indifferent: return "indifferent";
    case MoveFlag::Stay: return "stay";
  }
  return "?";
}

std::optional<MoveFlag> parse_move_flag(std::string_view text) {
  if (text == "improving") return MoveFlag::Improving;
  if (text == "indifferent") return MoveFlag::Indifferent;
  if (text == "stay") return MoveFlag::Stay;
  return std::nullopt;
}

SwitchResult indifferent_switch(const CongestionGame& game, const StrategyProfile& profile, PlayerId i,
                                StrategyIndex target) {
  const auto loads = congestion_vector(game, profile);
  if (i >= game.num_players()) throw ValidationError("player " + std::to_string(i) + " does not exist");
  if (target >= game.strategies(i).size())
    throw ValidationError("player " + std::to_string(i) + ": strategy " + std::to_string(target) + " does not exist");
  const BestResponse br = best_response(game, profile, loads, i);
  const Strategy& current = game.strategy(i, profile[i]);
  const Cost post = deviation_cost(game, loads, current, game.strategy(i, target));
  if (post > br.current_cost)
    throw ValidationError("player " + std::to_string(i) + ": switch to strategy " + std::to_string(target) +
                          " raises cost from " + std::to_string(br.current_cost) + " to " + std::to_string(post));

  SwitchResult result{profile, MoveFlag::Stay, br.current_cost, post, false};
  result.profile.set(i, target);
  if (target == profile[i]) {
    result.flag = MoveFlag::Stay;
    result.strict_legal = !br.improving;
  } else if (post < br.current_cost) {
    result.flag = MoveFlag::Improving;
    result.strict_legal = post == br.best_cost;
  } else {
    result.flag = MoveFlag::Indifferent;
    result.strict_legal = false;
  }
  return result;
}

}  // namespace cdl
