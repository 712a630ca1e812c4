#include "cdl/lowerbound.hpp"

#include "cdl/reductions.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace cdl {

namespace {

constexpr std::uint64_t kMaxResources = 20'000'000;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) throw ValidationError(std::string(what) + " overflows");
  return a * b;
}

std::uint64_t power(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out = checked_mul(out, base, "beta power");
  return out;
}

bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

unsigned bit_of(std::size_t alpha, std::size_t beta, std::size_t l) {
  return static_cast<unsigned>(((alpha % beta) >> l) & 1U);
}

}  // namespace

std::size_t LowerBoundParams::address_bits() const {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < beta) ++bits;
  return bits;
}

std::size_t LowerBoundParams::f(std::size_t level) const {
  if (level > 16) throw ValidationError("level too deep for exact f_i evaluation");
  // largest x with x^(2^(i+1)) · bits^(2^(i+1)−1) ≤ β^(2^(i+1)−1)
  const unsigned root = 1U << (level + 1);
  const BigInt bits = address_bits();
  const BigInt rhs = boost::multiprecision::pow(BigInt(beta), root - 1);
  const BigInt bits_pow = boost::multiprecision::pow(bits, root - 1);
  std::size_t x = 1;
  while (boost::multiprecision::pow(BigInt(x + 1), root) * bits_pow <= rhs) ++x;
  return std::max<std::size_t>(2, x);
}

void LowerBoundParams::validate() const {
  if (beta <= 10 || !is_power_of_two(beta))
    throw ValidationError("beta=" + std::to_string(beta) + " must be a power of two above 10");
  if (L < 1) throw ValidationError("L must be at least 1");
  if (m == 0) throw ValidationError("m must be positive");
  const std::uint64_t top = power(beta, L + 1);
  if (m % top != 0)
    throw ValidationError("m=" + std::to_string(m) + " is not divisible by beta^(L+1)=" + std::to_string(top));
  const std::size_t bits = address_bits();
  std::uint64_t resources = checked_mul(m, L + 1, "resource count");
  for (std::size_t i = 0; i <= L; ++i) {
    const std::uint64_t blocks = power(beta, i);
    const std::uint64_t share = checked_mul(blocks, f(i), "beta^i*f_i");
    if (m % share != 0)
      throw ValidationError("m=" + std::to_string(m) + " is not divisible by beta^" + std::to_string(i) + "*f_" +
                            std::to_string(i) + "=" + std::to_string(share));
    resources += checked_mul(checked_mul(blocks, f(i), "triplet count"), 4 * bits + beta, "resource count");
    if (i >= 1 && !(beta * f(i - 1) > f(i) * f(i) * bits))
      throw ValidationError("blocked-s0 dominance beta*f_" + std::to_string(i - 1) + " > f_" + std::to_string(i) +
                            "^2*log2(beta) fails at level " + std::to_string(i));
  }
  if (resources > kMaxResources)
    throw ValidationError("instance needs " + std::to_string(resources) + " resources, above the cap of " +
                          std::to_string(kMaxResources));
}

std::uint64_t LowerBoundParams::smallest_feasible_m(std::size_t beta, std::size_t L) {
  LowerBoundParams p{beta, L, 1};
  std::uint64_t m = power(beta, L + 1);
  for (std::size_t i = 0; i <= L; ++i) m = std::lcm(m, checked_mul(power(beta, i), p.f(i), "beta^i*f_i"));
  return m;
}

LowerBoundParams corollary_params(std::size_t n_target) {
  std::size_t beta = 1;
  while ((2 * beta) * (2 * beta) <= n_target) beta *= 2;
  if (beta < 16) throw ValidationError("corollary instance needs n_target >= 256 so that beta = sqrt(n) >= 16");
  return {beta, 1, LowerBoundParams::smallest_feasible_m(beta, 1)};
}

const char* to_string(Role role) {
  switch (role) {
    case Role::P: return "P";
    case Role::Q: return "Q";
    case Role::R: return "R";
  }
  return "?";
}

Cost LowerBoundInstance::unit(std::size_t level) const {
  return static_cast<Cost>(params.m / power(params.beta, level + 1)) * scale.convert_to<Cost>();
}

Cost LowerBoundInstance::p_move_delay(std::size_t level) const {
  return unit(level) * static_cast<Cost>(f[level]) * static_cast<Cost>(1 + params.address_bits());
}

StrategyProfile LowerBoundInstance::all_s0() const { return StrategyProfile::uniform(game.num_players(), 0); }

LowerBoundInstance build_gprime(const LowerBoundParams& params) {
  params.validate();
  const std::size_t beta = params.beta;
  const std::size_t bits = params.address_bits();
  std::vector<std::size_t> f;
  for (std::size_t i = 0; i <= params.L; ++i) f.push_back(params.f(i));
  std::vector<std::vector<BlockLayout>> levels;
  std::vector<PlayerInfo> players;

  RationalGame spec;
  PlayerId next_player = 0;
  for (std::size_t i = 0; i <= params.L; ++i) {
    const std::uint64_t blocks = power(beta, i);
    const std::size_t fi = f[i];
    const Rational unit(BigInt(params.m), BigInt(power(beta, i + 1)));
    std::vector<BlockLayout> level;
    level.reserve(blocks);
    for (std::size_t j = 1; j <= blocks; ++j) {
      BlockLayout b;
      b.level = i;
      b.block = j;
      b.bits = bits;
      b.beta = beta;
      b.main_count = params.m / blocks;
      b.main_begin = static_cast<ResourceId>(spec.delays.size());
      spec.delays.insert(spec.delays.end(), b.main_count, RationalDelay{1, 0});
      b.address_begin = static_cast<ResourceId>(spec.delays.size());
      spec.delays.insert(spec.delays.end(), fi * bits * 4, RationalDelay{unit * fi, 0});
      b.t_begin = static_cast<ResourceId>(spec.delays.size());
      for (std::size_t k = 1; k <= fi; ++k) {
        for (std::size_t alpha = 1; alpha <= beta; ++alpha) {
          const std::size_t factor = alpha % 2 == 1 ? fi - k : k - 1;
          spec.delays.push_back({0, unit * static_cast<long long>(factor)});
        }
        b.triplets.push_back({next_player, next_player + 1, next_player + 2});
        players.push_back({i, j, k, Role::P});
        players.push_back({i, j, k, Role::Q});
        players.push_back({i, j, k, Role::R});
        next_player += 3;
      }
      level.push_back(std::move(b));
    }
    levels.push_back(std::move(level));
  }

  spec.strategy_sets.resize(next_player);
  for (std::size_t i = 0; i <= params.L; ++i) {
    const std::size_t fi = f[i];
    for (const BlockLayout& b : levels[i]) {
      const std::uint64_t share = b.main_count / fi;
      for (std::size_t k = 1; k <= fi; ++k) {
        Strategy s0;
        for (std::uint64_t x = (k - 1) * share; x < k * share; ++x) s0.push_back(b.main(x));
        const Triplet& tr = b.triplets[k - 1];
        auto& p = spec.strategy_sets[tr.p];
        auto& q = spec.strategy_sets[tr.q];
        auto& r = spec.strategy_sets[tr.r];
        p.push_back(s0);
        q.push_back(s0);
        r.push_back(s0);
        for (std::size_t alpha = 1; alpha <= beta; ++alpha) {
          Strategy sq, sr, sp;
          for (std::size_t l = 0; l < bits; ++l) {
            const unsigned bit = bit_of(alpha, beta, l);
            sq.push_back(b.q(k, l, bit));
            sr.push_back(b.r(k, l, bit));
            sp.push_back(alpha % 2 == 0 ? b.q(k, l, 1 - bit) : b.r(k, l, 1 - bit));
          }
          sp.push_back(b.t(k, alpha));
          if (i < params.L) {
            const BlockLayout& target = levels[i + 1][(b.block - 1) * beta + alpha - 1];
            for (std::uint64_t x = 0; x < target.main_count; ++x) sp.push_back(target.main(x));
          }
          q.push_back(std::move(sq));
          r.push_back(std::move(sr));
          p.push_back(std::move(sp));
        }
      }
    }
  }
  // Level i+1 blocks are laid out after level i, so P strategies above were
  // built from complete layouts.
  ScaledGame scaled = scale_coefficients(spec);
  StrategyProfile initial = StrategyProfile::uniform(next_player, static_cast<StrategyIndex>(beta));
  return {params,          std::move(f),       std::move(scaled.game), std::move(levels),
          std::move(players), std::move(initial), scaled.factor};
}

LowerBoundSchedule build_algorithm1_schedule(const LowerBoundInstance& instance, std::size_t coverings) {
  const std::size_t beta = instance.params.beta;
  const std::size_t L = instance.params.L;
  const std::size_t n = instance.game.num_players();
  LowerBoundSchedule out;

  auto run = [&](auto&& self, std::size_t i, std::size_t j) -> void {
    const BlockLayout& b = instance.block(i, j);
    const std::size_t fi = instance.f[i];
    for (std::size_t alpha = 1; alpha <= beta; ++alpha) {
      const auto a = static_cast<StrategyIndex>(alpha);
      if (alpha % 2 == 0) {
        for (std::size_t k = 1; k <= fi; ++k) out.run.push_back({{b.triplets[k - 1].q, a}, alpha});
        for (std::size_t k = fi; k >= 1; --k) out.run.push_back({{b.triplets[k - 1].p, a}, alpha});
      } else {
        for (std::size_t k = 1; k <= fi; ++k) out.run.push_back({{b.triplets[k - 1].r, a}, alpha});
        for (std::size_t k = 1; k <= fi; ++k) out.run.push_back({{b.triplets[k - 1].p, a}, alpha});
      }
      if (i + 1 < L) self(self, i + 1, (j - 1) * beta + alpha);
    }
  };
  run(run, 0, 1);

  if (coverings == 0 || coverings > out.run.size())
    throw ValidationError("coverings must lie in [1, " + std::to_string(out.run.size()) + "]");
  out.coverings = coverings;

  std::vector<std::size_t> changes(n, 0);
  for (const RunMove& mv : out.run) ++changes[mv.step.player];
  out.max_run_moves = *std::max_element(changes.begin(), changes.end());

  std::vector<StrategyIndex> current = instance.initial.choices();
  std::vector<std::vector<ScriptStep>> chunks(coverings);
  std::vector<char> moved(n);
  for (std::size_t c = 0; c < coverings; ++c) {
    const std::size_t begin = c * out.run.size() / coverings;
    const std::size_t end = (c + 1) * out.run.size() / coverings;
    std::fill(moved.begin(), moved.end(), 0);
    for (std::size_t t = begin; t < end; ++t) {
      const ScriptStep& s = out.run[t].step;
      chunks[c].push_back(s);
      moved[s.player] = 1;
      current[s.player] = s.strategy;
    }
    for (PlayerId i = 0; i < n; ++i) {
      if (!moved[i]) chunks[c].push_back({i, current[i]});
    }
  }

  std::size_t T = 0;
  for (const auto& chunk : chunks) T = std::max(T, chunk.size());
  std::vector<PlayerId> top;
  for (PlayerId i = 0; i < n; ++i) {
    if (instance.players[i].level == L) top.push_back(i);
  }
  for (auto& chunk : chunks) {
    for (std::size_t pad = 0; chunk.size() < T; ++pad) {
      const PlayerId i = top[pad % top.size()];
      chunk.push_back({i, instance.initial[i]});
    }
    std::vector<std::size_t> counts(n, 0);
    for (const ScriptStep& s : chunk) out.max_moves_per_covering = std::max(out.max_moves_per_covering, ++counts[s.player]);
    out.script.steps.insert(out.script.steps.end(), chunk.begin(), chunk.end());
  }
  out.covering_length = T;
  return out;
}

BlockingReport verify_blocking_claim(const LowerBoundInstance& instance, const MoveTrace& trace) {
  const CongestionGame& game = instance.game;
  const std::size_t beta = instance.params.beta;
  const std::size_t L = instance.params.L;
  const auto bits = static_cast<Cost>(instance.params.address_bits());
  BlockingReport report;

  for (std::size_t i = 1; i <= L; ++i) {
    const auto lhs = static_cast<Cost>(beta * instance.f[i - 1]);
    const auto rhs = static_cast<Cost>(instance.f[i] * instance.f[i]) * bits;
    if (!(lhs > rhs))
      report.dominance.push_back({0, "level " + std::to_string(i) + ": beta*f_(i-1)=" + std::to_string(lhs) +
                                         " <= f_i^2*log2(beta)=" + std::to_string(rhs)});
  }

  StrategyProfile profile = trace.initial;
  CongestionVector loads = congestion_vector(game, profile);

  // A whole P group on one s_α: block (i+1, (j−1)β+α) must carry load ≥ f_i,
  // and its players' s_0 must cost more than a scripted move delay.
  auto checkpoint = [&](std::size_t step, std::size_t i, std::size_t j) {
    const BlockLayout& b = instance.block(i, j);
    const StrategyIndex alpha = profile[b.triplets[0].p];
    if (alpha == 0) return;
    for (const Triplet& tr : b.triplets) {
      if (profile[tr.p] != alpha) return;
    }
    ++report.checkpoints;
    if (i >= L) return;
    const BlockLayout& target = instance.block(i + 1, (j - 1) * beta + alpha);
    const auto fi = static_cast<Cost>(instance.f[i]);
    for (std::uint64_t x = 0; x < target.main_count; ++x) {
      if (loads[target.main(x)] < fi) {
        report.congestion.push_back({step, "main resource " + std::to_string(target.main(x)) + " of block (" +
                                               std::to_string(i + 1) + "," + std::to_string(target.block) +
                                               ") has load " + std::to_string(loads[target.main(x)])});
        break;
      }
    }
    const Cost bound = instance.p_move_delay(i + 1);
    for (const Triplet& tr : target.triplets) {
      for (PlayerId pl : {tr.p, tr.q, tr.r}) {
        ++report.blocked_s0_checks;
        const Cost s0 = deviation_cost(game, loads, game.strategy(pl, profile[pl]), game.strategy(pl, 0));
        if (!(s0 > bound))
          report.blocked_s0.push_back({step, "player " + std::to_string(pl) + " s_0 costs " + std::to_string(s0) +
                                                 ", not above " + std::to_string(bound)});
      }
    }
  };

  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 1; j <= instance.levels[i].size(); ++j) checkpoint(0, i, j);
  }

  for (std::size_t t = 0; t < trace.moves.size(); ++t) {
    const Move& mv = trace.moves[t];
    const PlayerInfo& who = instance.players.at(mv.player);
    const Strategy& current = game.strategy(mv.player, profile[mv.player]);
    const Cost pre = strategy_cost(game, loads, current);
    const Cost post = deviation_cost(game, loads, current, game.strategy(mv.player, mv.strategy));
    if (post > pre)
      report.worsening.push_back({t, "player " + std::to_string(mv.player) + " moves from cost " + std::to_string(pre) +
                                         " to " + std::to_string(post)});
    const bool p_switch = who.role == Role::P && mv.strategy != profile[mv.player];
    if (p_switch) {
      ++report.p_moves;
      const Cost expected = instance.p_move_delay(who.level);
      if (pre != expected || post != expected)
        report.equal_delay.push_back({t, "P player " + std::to_string(mv.player) + ": pre " + std::to_string(pre) +
                                             ", post " + std::to_string(post) + ", expected " +
                                             std::to_string(expected)});
      const StrategyIndex from = profile[mv.player];
      for (StrategyIndex a = 1; a <= beta; ++a) {
        if (a == from || a == mv.strategy) continue;
        ++report.deviation_checks;
        const Cost dev = deviation_cost(game, loads, current, game.strategy(mv.player, a));
        if (!(dev > pre))
          report.deviation.push_back({t, "P player " + std::to_string(mv.player) + " s_" + std::to_string(a) +
                                             " costs " + std::to_string(dev) + ", not above " + std::to_string(pre)});
      }
    }
    for (ResourceId e : current) --loads[e];
    profile.set(mv.player, mv.strategy);
    for (ResourceId e : game.strategy(mv.player, mv.strategy)) ++loads[e];
    if (p_switch && who.level < L) checkpoint(t + 1, who.level, who.block);
  }
  return report;
}

OptReference all_s0_reference(const LowerBoundInstance& instance) {
  return {social_cost(instance.game, instance.all_s0()), false};
}

RatioTrajectory ratio_trajectory(const LowerBoundInstance& instance, const MoveTrace& trace, const OptReference& opt) {
  if (opt.value <= 0) throw ValidationError("reference optimum must be positive");
  const CongestionGame& game = instance.game;
  const std::size_t L = instance.params.L;
  RatioTrajectory out;
  out.floor = Rational(static_cast<long long>(instance.f[L - 1]), static_cast<long long>(3 * (L + 1)));
  out.advisory = !opt.exact;

  StrategyProfile profile = trace.initial;
  Cost cost = social_cost(game, profile);
  auto record = [&](std::size_t step) {
    Rational ratio(cost, opt.value);
    if (out.points.empty() || ratio < out.min_ratio) out.min_ratio = ratio;
    out.points.push_back({step, cost, std::move(ratio)});
  };
  record(0);
  for (std::size_t t = 0; t < trace.moves.size(); ++t) {
    const Move& mv = trace.moves[t];
    if (mv.strategy != profile[mv.player]) {
      profile.set(mv.player, mv.strategy);
      cost = social_cost(game, profile);
    }
    record(t + 1);
  }
  out.holds = out.min_ratio >= out.floor;
  out.level_costs.assign(L + 1, 0);
  for (PlayerId i = 0; i < game.num_players(); ++i) out.level_costs[instance.players[i].level] += player_cost(game, profile, i);
  return out;
}

Cost delay_mass(const CongestionGame& game, const StrategyProfile& profile) {
  const CongestionVector loads = congestion_vector(game, profile);
  Cost total = 0;
  for (ResourceId e = 0; e < loads.size(); ++e) {
    if (loads[e] > 0) total += game.delay(e)(loads[e]);
  }
  return total;
}

}  // namespace cdl
