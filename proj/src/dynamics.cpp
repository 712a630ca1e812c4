#include "cdl/dynamics.hpp"

#include "cdl/random.hpp"

#include <algorithm>
#include <numeric>

namespace cdl {

void FairnessSpec::validate(std::size_t players) const {
  if (T < players)
    throw ValidationError("covering length T=" + std::to_string(T) + " is below the player count " +
                          std::to_string(players));
  if (beta < 1 || beta > T)
    throw ValidationError("beta=" + std::to_string(beta) + " must lie in [1, T=" + std::to_string(T) + "]");
}

const char* to_string(Mode mode) { return mode == Mode::Strict ? "strict" : "permissive"; }

StrategyProfile MoveTrace::profile_after(std::size_t steps) const {
  StrategyProfile profile = initial;
  for (std::size_t t = 0; t < steps && t < moves.size(); ++t) profile.set(moves[t].player, moves[t].strategy);
  return profile;
}

std::vector<PlayerId> random_fair_schedule(std::size_t players, const FairnessSpec& spec, std::uint64_t seed,
                                           std::size_t num_coverings) {
  spec.validate(players);
  if (spec.T > spec.beta * players)
    throw ValidationError("T=" + std::to_string(spec.T) + " exceeds beta*n=" + std::to_string(spec.beta * players) +
                          ": no beta-bounded covering of that length exists");
  Rng rng(seed);
  std::vector<PlayerId> schedule;
  schedule.reserve(spec.T * num_coverings);
  std::vector<std::size_t> moves(players);
  std::vector<PlayerId> eligible;
  eligible.reserve(players);
  for (std::size_t c = 0; c < num_coverings; ++c) {
    std::fill(moves.begin(), moves.end(), 0);
    std::size_t unserved = players;
    for (std::size_t remaining = spec.T; remaining > 0; --remaining) {
      // Once the remaining steps equal the idle players, only idle players may move.
      const bool forced = remaining == unserved;
      eligible.clear();
      for (PlayerId i = 0; i < players; ++i) {
        if (forced ? moves[i] == 0 : moves[i] < spec.beta) eligible.push_back(i);
      }
      const PlayerId pick = eligible[uniform_below(rng, eligible.size())];
      if (moves[pick]++ == 0) --unserved;
      schedule.push_back(pick);
    }
  }
  return schedule;
}

namespace {

class Runner {
 public:
  Runner(const CongestionGame& game, const StrategyProfile& initial, Mode mode, TiePolicy tie)
      : game_(game), profile_(initial), loads_(congestion_vector(game, initial)), mode_(mode), tie_(tie) {
    social_ = social_cost_from_loads(game_, loads_);
    potential_ = potential_from_loads(game_, loads_);
  }

  /// Schedules player i; `target` is the scripted strategy, if any.
  Move step(std::size_t t, PlayerId i, std::optional<StrategyIndex> target) {
    if (i >= game_.num_players()) throw ValidationError("step " + std::to_string(t) + ": unknown player " + std::to_string(i));
    Move move;
    move.step = t;
    move.player = i;
    move.previous = profile_[i];
    StrategyIndex next = profile_[i];
    if (mode_ == Mode::Strict) {
      try {
        const BestResponse br =
            best_response(game_, profile_, loads_, i, target ? TiePolicy(Prefer{*target}) : tie_);
        next = br.index;
        move.pre_cost = br.current_cost;
        move.post_cost = br.best_cost;
      } catch (const ValidationError& err) {
        throw ValidationError("step " + std::to_string(t) + ": " + err.what());
      }
    } else {
      const auto& strategies = game_.strategies(i);
      const Strategy& current = strategies[profile_[i]];
      move.pre_cost = strategy_cost(game_, loads_, current);
      if (target) {
        if (*target >= strategies.size())
          throw ValidationError("step " + std::to_string(t) + ": player " + std::to_string(i) +
                                " has no strategy " + std::to_string(*target));
        next = *target;
        move.post_cost = deviation_cost(game_, loads_, current, strategies[next]);
        if (move.post_cost > move.pre_cost)
          throw ValidationError("step " + std::to_string(t) + ": player " + std::to_string(i) + " switch to " +
                                std::to_string(next) + " raises cost from " + std::to_string(move.pre_cost) +
                                " to " + std::to_string(move.post_cost));
      } else {
        const BestResponse br = best_response(game_, profile_, loads_, i, tie_);
        next = br.index;
        move.post_cost = br.best_cost;
      }
    }
    move.strategy = next;
    if (next == move.previous) {
      move.flag = MoveFlag::Stay;
    } else {
      move.flag = move.post_cost < move.pre_cost ? MoveFlag::Improving : MoveFlag::Indifferent;
      apply(i, next);
    }
    move.social_cost = social_;
    move.potential = potential_;
    return move;
  }

  const StrategyProfile& profile() const { return profile_; }

 private:
  void adjust(ResourceId e, Cost delta) {
    const Delay& d = game_.delay(e);
    const Cost before = loads_[e];
    const Cost after = before + delta;
    social_ += after * d(after) - before * d(before);
    potential_ += delta > 0 ? d(after) : -d(before);
    loads_[e] = after;
  }

  void apply(PlayerId i, StrategyIndex next) {
    const Strategy& from = game_.strategy(i, profile_[i]);
    const Strategy& to = game_.strategy(i, next);
    for (ResourceId e : from) adjust(e, -1);
    for (ResourceId e : to) adjust(e, +1);
    profile_.set(i, next);
  }

  const CongestionGame& game_;
  StrategyProfile profile_;
  CongestionVector loads_;
  Mode mode_;
  TiePolicy tie_;
  Cost social_ = 0;
  Cost potential_ = 0;
};

}  // namespace

MoveTrace run_dynamics(const CongestionGame& game, const StrategyProfile& initial, const SchedulePolicy& policy,
                       std::size_t num_coverings, Mode mode, TiePolicy tie) {
  validate_profile(game, initial);
  const std::size_t n = game.num_players();
  MoveTrace trace;
  trace.initial = initial;
  trace.mode = mode;
  Runner runner(game, initial, mode, tie);

  if (const auto* rr = std::get_if<RoundRobin>(&policy)) {
    std::vector<PlayerId> order = rr->order;
    if (order.empty()) {
      order.resize(n);
      std::iota(order.begin(), order.end(), PlayerId{0});
    }
    std::vector<PlayerId> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted.size() != n || sorted[i] != i) throw ValidationError("round-robin order is not a permutation of the players");
    }
    trace.covering_length = n;
    trace.moves.reserve(n * num_coverings);
    for (std::size_t c = 0; c < num_coverings; ++c) {
      for (PlayerId i : order) trace.moves.push_back(runner.step(trace.moves.size(), i, std::nullopt));
    }
  } else if (const auto* rf = std::get_if<RandomFair>(&policy)) {
    trace.covering_length = rf->spec.T;
    const auto schedule = random_fair_schedule(n, rf->spec, rf->seed, num_coverings);
    trace.moves.reserve(schedule.size());
    for (PlayerId i : schedule) trace.moves.push_back(runner.step(trace.moves.size(), i, std::nullopt));
  } else {
    const auto& script = std::get<Scripted>(policy).steps;
    if (num_coverings == 0 || script.size() % num_coverings != 0)
      throw ValidationError("script of " + std::to_string(script.size()) + " steps does not split into " +
                            std::to_string(num_coverings) + " equal coverings");
    trace.covering_length = script.size() / num_coverings;
    trace.moves.reserve(script.size());
    for (const ScriptStep& s : script) trace.moves.push_back(runner.step(trace.moves.size(), s.player, s.strategy));
  }
  if (trace.covering_length == 0) trace.covering_length = 1;
  return trace;
}

bool CoveringValidationReport::valid() const {
  return std::all_of(coverings.begin(), coverings.end(), [](const CoveringCheck& c) { return c.ok(); });
}

CoveringValidationReport validate_fairness(const MoveTrace& trace, std::size_t players, const FairnessSpec& spec) {
  if (spec.T == 0 || trace.moves.size() % spec.T != 0)
    throw ValidationError("trace of " + std::to_string(trace.moves.size()) + " moves is not a multiple of T=" +
                          std::to_string(spec.T));
  CoveringValidationReport report;
  std::vector<std::size_t> counts(players);
  for (std::size_t begin = 0; begin < trace.moves.size(); begin += spec.T) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t t = begin; t < begin + spec.T; ++t) ++counts.at(trace.moves[t].player);
    CoveringCheck check;
    for (PlayerId i = 0; i < players; ++i) {
      if (counts[i] == 0) check.idle_players.push_back(i);
      if (counts[i] > spec.beta) check.overactive_players.emplace_back(i, counts[i]);
    }
    report.coverings.push_back(std::move(check));
  }
  return report;
}

bool CoveringView::live() const {
  return std::all_of(last.begin(), last.end(), [](const auto& l) { return l.has_value(); });
}

std::vector<CoveringView> covering_views(const MoveTrace& trace, std::size_t players) {
  std::vector<CoveringView> views;
  const std::size_t T = trace.covering_length;
  StrategyProfile profile = trace.initial;
  for (std::size_t begin = 0; begin + T <= trace.moves.size(); begin += T) {
    CoveringView view;
    view.begin = begin;
    view.length = T;
    view.start = profile;
    view.last.assign(players, std::nullopt);
    view.movers.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
      const Move& move = trace.moves[begin + t];
      view.movers.push_back(move.player);
      view.last.at(move.player) = t + 1;
      profile.set(move.player, move.strategy);
    }
    view.end = profile;
    views.push_back(std::move(view));
  }
  return views;
}

void verify_trace_replay(const CongestionGame& game, const MoveTrace& trace) {
  StrategyProfile profile = trace.initial;
  validate_profile(game, profile);
  for (const Move& move : trace.moves) {
    const std::string where = "step " + std::to_string(move.step) + ": ";
    if (move.player >= game.num_players()) throw ValidationError(where + "unknown player");
    if (profile[move.player] != move.previous) throw ValidationError(where + "recorded previous strategy disagrees with replay");
    const Cost pre = player_cost(game, profile, move.player);
    if (move.strategy >= game.strategies(move.player).size()) throw ValidationError(where + "unknown strategy");
    profile.set(move.player, move.strategy);
    const Cost post = player_cost(game, profile, move.player);
    if (pre != move.pre_cost || post != move.post_cost) throw ValidationError(where + "recorded player costs disagree with replay");
    if (social_cost(game, profile) != move.social_cost) throw ValidationError(where + "recorded social cost disagrees with replay");
    if (potential(game, profile) != move.potential) throw ValidationError(where + "recorded potential disagrees with replay");
  }
}

}  // namespace cdl
