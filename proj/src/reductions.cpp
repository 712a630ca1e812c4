#include "cdl/reductions.hpp"

#include "cdl/random.hpp"

#include <algorithm>
#include <limits>

namespace cdl {

namespace {

Cost to_cost(const Rational& value, const char* what) {
  if (boost::multiprecision::denominator(value) != 1) throw std::logic_error("scaled coefficient is not integral");
  const BigInt v = boost::multiprecision::numerator(value);
  if (v < 0) throw ValidationError(std::string("negative ") + what + " coefficient");
  if (v > std::numeric_limits<Cost>::max()) throw ValidationError(std::string("scaled ") + what + " coefficient overflows");
  return v.convert_to<Cost>();
}

struct Layout {
  std::vector<ResourceId> a_begin;  // first A_e resource
  std::vector<ResourceId> b_begin;  // first resource of B^0_e; B^j_e follows at + j*b_e
  std::vector<ResourceOrigin> provenance;
};

Layout lay_out(const CongestionGame& game, std::size_t cap) {
  const std::size_t n = game.num_players();
  std::uint64_t total = 0;
  for (const Delay& d : game.delays()) total += static_cast<std::uint64_t>(d.a) + n * static_cast<std::uint64_t>(d.b);
  if (total > cap)
    throw ValidationError("identity reduction needs " + std::to_string(total) + " resources, above the cap of " +
                          std::to_string(cap));
  Layout layout;
  layout.provenance.reserve(total);
  for (ResourceId e = 0; e < game.num_resources(); ++e) {
    const Delay& d = game.delay(e);
    layout.a_begin.push_back(static_cast<ResourceId>(layout.provenance.size()));
    for (Cost c = 0; c < d.a; ++c) layout.provenance.push_back({e, CopyKind::A, 0});
    layout.b_begin.push_back(static_cast<ResourceId>(layout.provenance.size()));
    for (PlayerId j = 0; j < n; ++j) {
      for (Cost c = 0; c < d.b; ++c) layout.provenance.push_back({e, CopyKind::B, j});
    }
  }
  return layout;
}

Strategy lift(const CongestionGame& game, const Layout& layout, const Strategy& s, PlayerId copy) {
  Strategy out;
  for (ResourceId e : s) {
    const Delay& d = game.delay(e);
    for (Cost c = 0; c < d.a; ++c) out.push_back(layout.a_begin[e] + static_cast<ResourceId>(c));
    const ResourceId b0 = layout.b_begin[e] + static_cast<ResourceId>(copy * d.b);
    for (Cost c = 0; c < d.b; ++c) out.push_back(b0 + static_cast<ResourceId>(c));
  }
  return out;
}

std::vector<Delay> identity_delays(std::size_t count) { return std::vector<Delay>(count, Delay{1, 0}); }

}  // namespace

ScaledGame scale_coefficients(const RationalGame& game, EmptyStrategies empty) {
  BigInt factor = 1;
  for (const auto& d : game.delays) {
    if (d.a < 0 || d.b < 0) throw ValidationError("negative delay coefficient");
    factor = boost::multiprecision::lcm(factor, boost::multiprecision::denominator(d.a));
    factor = boost::multiprecision::lcm(factor, boost::multiprecision::denominator(d.b));
  }
  std::vector<Delay> delays;
  delays.reserve(game.delays.size());
  for (const auto& d : game.delays) {
    delays.push_back({to_cost(d.a * Rational(factor), "a"), to_cost(d.b * Rational(factor), "b")});
  }
  return {CongestionGame(std::move(delays), game.strategy_sets, empty), factor};
}

RationalGame to_rational(const CongestionGame& game) {
  RationalGame out;
  for (const Delay& d : game.delays()) out.delays.push_back({Rational(d.a), Rational(d.b)});
  out.strategy_sets = game.strategy_sets();
  return out;
}

ReductionMap::ReductionMap(CongestionGame source, CongestionGame target, std::vector<ResourceOrigin> provenance,
                           bool symmetric)
    : source_(std::move(source)), target_(std::move(target)), provenance_(std::move(provenance)), symmetric_(symmetric) {}

StrategyIndex ReductionMap::map_strategy(PlayerId i, StrategyIndex k) const {
  if (!symmetric_) return k;
  return static_cast<StrategyIndex>(k * source_.num_players() + i);
}

StrategyProfile ReductionMap::map_profile(const StrategyProfile& profile) const {
  validate_profile(source_, profile);
  std::vector<StrategyIndex> out(profile.size());
  for (PlayerId i = 0; i < profile.size(); ++i) out[i] = map_strategy(i, profile[i]);
  return StrategyProfile(std::move(out));
}

std::optional<std::string> ReductionMap::b_set_clash(const StrategyProfile& target_profile) const {
  // owner of each (source resource, copy) B-set seen so far
  std::vector<std::vector<std::optional<PlayerId>>> users(source_.num_resources(),
                                                          std::vector<std::optional<PlayerId>>(source_.num_players()));
  for (PlayerId i = 0; i < target_profile.size(); ++i) {
    const Strategy& s = target_.strategy(i, target_profile[i]);
    for (std::size_t pos = 0; pos < s.size(); ++pos) {
      const ResourceOrigin& origin = provenance_[s[pos]];
      if (origin.kind != CopyKind::B) continue;
      // one entry per B-set: skip all but the first resource of the set
      if (pos > 0) {
        const ResourceOrigin& prev = provenance_[s[pos - 1]];
        if (prev.kind == CopyKind::B && prev.source == origin.source && prev.owner == origin.owner) continue;
      }
      auto& slot = users[origin.source][origin.owner];
      if (slot && *slot != i)
        return "players " + std::to_string(*slot) + " and " + std::to_string(i) + " both use B^" +
               std::to_string(origin.owner) + " of resource " + std::to_string(origin.source);
      slot = i;
    }
  }
  return std::nullopt;
}

ReductionMap reduce_to_identity(const CongestionGame& game, std::size_t resource_cap) {
  const Layout layout = lay_out(game, resource_cap);
  std::vector<std::vector<Strategy>> sets(game.num_players());
  for (PlayerId i = 0; i < game.num_players(); ++i) {
    for (const Strategy& s : game.strategies(i)) sets[i].push_back(lift(game, layout, s, i));
  }
  CongestionGame target(identity_delays(layout.provenance.size()), std::move(sets), EmptyStrategies::Allow);
  return ReductionMap(game, std::move(target), layout.provenance, false);
}

ReductionMap reduce_to_identity_symmetric(const CongestionGame& game, std::size_t resource_cap) {
  if (!game.is_symmetric()) throw ValidationError("symmetric reduction needs a symmetric game");
  const Layout layout = lay_out(game, resource_cap);
  const std::size_t n = game.num_players();
  // Player 0's ordering is authoritative; other players' indices are remapped to it.
  const auto& shared = game.strategies(0);
  for (PlayerId i = 1; i < n; ++i) {
    if (game.strategies(i) != shared)
      throw ValidationError("symmetric reduction needs identical strategy lists (same order) for every player");
  }
  std::vector<Strategy> copies;
  copies.reserve(shared.size() * n);
  for (const Strategy& s : shared) {
    for (PlayerId j = 0; j < n; ++j) copies.push_back(lift(game, layout, s, j));
  }
  std::vector<std::vector<Strategy>> sets(n, copies);
  CongestionGame target(identity_delays(layout.provenance.size()), std::move(sets), EmptyStrategies::Allow);
  return ReductionMap(game, std::move(target), layout.provenance, true);
}

ReductionReport verify_reduction(const ReductionMap& map, std::size_t num_traces, std::uint64_t seed,
                                 std::size_t steps_per_trace) {
  const CongestionGame& source = map.source();
  const CongestionGame& target = map.target();
  const std::size_t n = source.num_players();
  Rng rng(seed);
  ReductionReport report;

  auto costs_of = [](const CongestionGame& game, const StrategyProfile& profile, std::span<const Cost> loads,
                     PlayerId i, auto&& index_of) {
    const auto& strategies = game.strategies(i);
    const Strategy& current = strategies[profile[i]];
    std::vector<Cost> out;
    for (StrategyIndex k = 0; k < index_of.size(); ++k) out.push_back(deviation_cost(game, loads, current, strategies[index_of[k]]));
    return out;
  };

  for (std::size_t run = 0; run < num_traces; ++run) {
    std::vector<StrategyIndex> choices(n);
    for (PlayerId i = 0; i < n; ++i) choices[i] = static_cast<StrategyIndex>(uniform_below(rng, source.strategies(i).size()));
    StrategyProfile s(std::move(choices));

    for (std::size_t step = 0; step < steps_per_trace; ++step) {
      ++report.steps;
      const StrategyProfile t = map.map_profile(s);
      const auto source_loads = congestion_vector(source, s);
      const auto target_loads = congestion_vector(target, t);
      ++report.profiles_checked;

      auto fail = [&](PlayerId i, std::string reason) {
        std::vector<StrategyIndex> own(source.strategies(i).size());
        std::vector<StrategyIndex> mapped(own.size());
        for (StrategyIndex k = 0; k < own.size(); ++k) {
          own[k] = k;
          mapped[k] = map.map_strategy(i, k);
        }
        report.mismatches.push_back({s, i, costs_of(source, s, source_loads, i, own),
                                     costs_of(target, t, target_loads, i, mapped), std::move(reason)});
      };

      if (social_cost_from_loads(source, source_loads) != social_cost_from_loads(target, target_loads)) {
        fail(0, "social cost differs");
        break;
      }
      if (map.symmetric()) {
        if (auto clash = map.b_set_clash(t)) {
          fail(0, *clash);
          break;
        }
      }
      bool broken = false;
      bool source_nash = true;
      for (PlayerId i = 0; i < n && !broken; ++i) {
        const BestResponse sb = best_response(source, s, source_loads, i);
        const BestResponse tb = best_response(target, t, target_loads, i);
        if (sb.improving) source_nash = false;
        if (sb.current_cost != tb.current_cost) {
          fail(i, "player cost differs");
          broken = true;
        } else if (sb.best_cost != tb.best_cost || sb.improving != tb.improving) {
          fail(i, "best-response value differs");
          broken = true;
        } else {
          // k is a best response in the source iff its image is one in the target
          const Strategy& cur_s = source.strategy(i, s[i]);
          const Strategy& cur_t = target.strategy(i, t[i]);
          for (StrategyIndex k = 0; k < source.strategies(i).size(); ++k) {
            const Cost cs = deviation_cost(source, source_loads, cur_s, source.strategy(i, k));
            const Cost ct = deviation_cost(target, target_loads, cur_t, target.strategy(i, map.map_strategy(i, k)));
            const bool source_br = sb.improving ? cs == sb.best_cost : k == s[i];
            const bool target_br = tb.improving ? ct == tb.best_cost : map.map_strategy(i, k) == t[i];
            if (cs != ct || source_br != target_br) {
              fail(i, "strategy " + std::to_string(k) + " maps to a target strategy with different cost or best-response status");
              broken = true;
              break;
            }
          }
        }
      }
      if (broken) break;
      const bool target_nash = [&] {
        for (PlayerId i = 0; i < n; ++i) {
          if (best_response(target, t, target_loads, i).improving) return false;
        }
        return true;
      }();
      if (source_nash != target_nash) {
        fail(0, "Nash status differs");
        break;
      }
      if (source_nash) ++report.nash_profiles;

      // advance the source with a random player's best response (lowest index among ties)
      const PlayerId mover = static_cast<PlayerId>(uniform_below(rng, n));
      const BestResponse br = best_response(source, s, source_loads, mover);
      if (br.improving) {
        s.set(mover, br.index);
      } else if (source_nash) {
        // restart from a fresh random profile so later steps keep exercising moves
        for (PlayerId i = 0; i < n; ++i) s.set(i, static_cast<StrategyIndex>(uniform_below(rng, source.strategies(i).size())));
      }
    }
  }
  return report;
}

}  // namespace cdl
