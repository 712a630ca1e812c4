#include "cdl/analysis.hpp"

#include "cdl/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cdl {

namespace {

/// Mixed-radix walk over all profiles with incremental loads and social cost.
template <typename Visit>
std::uint64_t enumerate_profiles(const CongestionGame& game, std::uint64_t budget, Visit&& visit) {
  const std::uint64_t space = game.profile_space_size();
  if (space > budget)
    throw BudgetExceeded("profile space of " + std::to_string(space) + " exceeds the brute-force budget of " +
                         std::to_string(budget) + "; use the heuristic optimum");
  const std::size_t n = game.num_players();
  StrategyProfile profile = StrategyProfile::uniform(n, 0);
  CongestionVector loads = congestion_vector(game, profile);
  Cost social = social_cost_from_loads(game, loads);
  auto adjust = [&](ResourceId e, Cost delta) {
    const Delay& d = game.delay(e);
    const Cost before = loads[e];
    const Cost after = before + delta;
    social += after * d(after) - before * d(before);
    loads[e] = after;
  };
  auto change = [&](PlayerId i, StrategyIndex k) {
    for (ResourceId e : game.strategy(i, profile[i])) adjust(e, -1);
    for (ResourceId e : game.strategy(i, k)) adjust(e, +1);
    profile.set(i, k);
  };
  std::uint64_t visited = 0;
  while (true) {
    ++visited;
    visit(profile, std::span<const Cost>(loads), social);
    PlayerId i = 0;
    while (i < n) {
      const StrategyIndex next = profile[i] + 1;
      if (next < game.strategies(i).size()) {
        change(i, next);
        break;
      }
      change(i, 0);
      ++i;
    }
    if (i == n) break;
  }
  return visited;
}

bool has_improving_move(const CongestionGame& game, const StrategyProfile& profile, std::span<const Cost> loads) {
  for (PlayerId i = 0; i < game.num_players(); ++i) {
    if (best_response(game, profile, loads, i).improving) return true;
  }
  return false;
}

bool contains(const Strategy& strategy, ResourceId e) {
  return std::binary_search(strategy.begin(), strategy.end(), e);
}

BigInt big(Cost v) { return BigInt(v); }

InequalityCheck make_check(const char* name, BigInt lhs, RootBound rhs, BigInt scale = 1) {
  InequalityCheck check;
  check.name = name;
  check.lhs = std::move(lhs);
  check.rhs = std::move(rhs);
  check.scale = std::move(scale);
  check.holds = leq(check.lhs, check.rhs);
  return check;
}

InequalityCheck equality_check(const char* name, Cost lhs, Cost rhs) {
  InequalityCheck check;
  check.name = name;
  check.lhs = lhs;
  check.rhs.constant = rhs;
  check.holds = lhs == rhs;
  return check;
}

struct OptimumData {
  const StrategyProfile& profile;
  CongestionVector loads;
  std::vector<ResourceId> used;  // resources with n_e(S*) > 0
};

OptimumData optimum_data(const CongestionGame& game, const StrategyProfile& optimum) {
  OptimumData data{optimum, congestion_vector(game, optimum), {}};
  for (ResourceId e = 0; e < data.loads.size(); ++e) {
    if (data.loads[e] > 0) data.used.push_back(e);
  }
  return data;
}

/// Σ_i Σ_{e ∈ s_i(S) ∩ s*_i} b_e, the B-copy part of Σ_e n_e(S) n_e(S*) on the identity reduction.
Cost own_overlap(const CongestionGame& game, const StrategyProfile& profile, const StrategyProfile& optimum) {
  Cost total = 0;
  for (PlayerId i = 0; i < profile.size(); ++i) {
    const Strategy& mine = game.strategy(i, profile[i]);
    for (ResourceId e : game.strategy(i, optimum[i])) {
      if (contains(mine, e)) total += game.delay(e).b;
    }
  }
  return total;
}

/// Evaluates one covering of length T starting at `begin`; `profile` and
/// `loads` must describe S^0 and are advanced to S^T.
CoveringQuantities evaluate_covering(const CongestionGame& game, const MoveTrace& trace, std::size_t begin,
                                     std::size_t T, StrategyProfile& profile, CongestionVector& loads,
                                     const OptimumData& opt, bool with_gamma) {
  const std::size_t n = game.num_players();
  std::vector<std::size_t> last(n, 0);
  for (std::size_t t = 0; t < T; ++t) last[trace.moves[begin + t].player] = t + 1;
  for (PlayerId i = 0; i < n; ++i) {
    if (last[i] == 0)
      throw ValidationError("covering starting at step " + std::to_string(begin) + ": player " + std::to_string(i) +
                            " never moves, last(i) is undefined");
  }

  CoveringQuantities q;
  q.start_cost = social_cost_from_loads(game, loads);
  q.start_potential = potential_from_loads(game, loads);

  // H(R) = Σ_i Σ_{e∈s*_i} n_e(S^0), lifted to the identity reduction.
  for (PlayerId i = 0; i < n; ++i) {
    const Strategy& mine = game.strategy(i, profile[i]);
    for (ResourceId e : game.strategy(i, opt.profile[i])) {
      const Delay& d = game.delay(e);
      q.h += d.a * loads[e] + (contains(mine, e) ? d.b : 0);
    }
  }
  // Resource form Σ_e n_e(S^0) n_e(S*) over the reduction's A and B copies.
  for (ResourceId e : opt.used) q.h_resource_form += game.delay(e).a * loads[e] * opt.loads[e];
  q.h_resource_form += own_overlap(game, profile, opt.profile);

  Cost n_gamma = 0;
  for (std::size_t t = 0; t < T; ++t) {
    const Move& move = trace.moves[begin + t];
    const PlayerId p = move.player;
    const bool is_last = last[p] == t + 1;
    if (is_last) {
      const Strategy& mine = game.strategy(p, profile[p]);
      for (ResourceId e : game.strategy(p, opt.profile[p])) {
        const Delay& d = game.delay(e);
        q.rho += d.a * (loads[e] + 1) + d.b * ((contains(mine, e) ? 1 : 0) + 1);
      }
      if (with_gamma) {
        for (ResourceId e : opt.used) n_gamma += opt.loads[e] * game.delay(e)(loads[e] + 1);
      }
    }
    if (move.strategy != profile[p]) {
      for (ResourceId e : game.strategy(p, profile[p])) --loads[e];
      for (ResourceId e : game.strategy(p, move.strategy)) ++loads[e];
      profile.set(p, move.strategy);
    }
    if (is_last) q.last_move_costs += strategy_cost(game, loads, game.strategy(p, profile[p]));
  }

  q.end_cost = social_cost_from_loads(game, loads);
  q.end_potential = potential_from_loads(game, loads);
  for (ResourceId e : opt.used) q.end_overlap += game.delay(e).a * loads[e] * opt.loads[e];
  q.end_overlap += own_overlap(game, profile, opt.profile);
  if (with_gamma) q.n_gamma = n_gamma;
  return q;
}

CoveringQuantities quantities_at(const CongestionGame& game, const MoveTrace& trace, std::size_t covering,
                                 const StrategyProfile& optimum, bool with_gamma) {
  validate_profile(game, optimum);
  const std::size_t T = trace.covering_length;
  if ((covering + 1) * T > trace.moves.size())
    throw ValidationError("covering " + std::to_string(covering) + " is beyond the end of the trace");
  StrategyProfile profile = trace.profile_after(covering * T);
  CongestionVector loads = congestion_vector(game, profile);
  const OptimumData opt = optimum_data(game, optimum);
  return evaluate_covering(game, trace, covering * T, T, profile, loads, opt, with_gamma);
}

std::string fmt_term(const BigInt& coeff, const BigInt& radicand) {
  std::ostringstream out;
  if (coeff != 1) out << coeff << "*";
  out << "sqrt(" << radicand << ")";
  return out.str();
}

}  // namespace

OptimumCertificate compute_opt(const CongestionGame& game, std::uint64_t budget) {
  OptimumCertificate best;
  bool first = true;
  best.explored = enumerate_profiles(game, budget, [&](const StrategyProfile& profile, std::span<const Cost>, Cost social) {
    if (first || social < best.value) {
      best.value = social;
      best.profile = profile;
      first = false;
    }
  });
  best.exact = true;
  return best;
}

OptimumCertificate heuristic_opt(const CongestionGame& game, std::uint64_t seed, std::size_t restarts) {
  Rng rng(seed);
  const std::size_t n = game.num_players();
  OptimumCertificate best;
  best.exact = false;
  bool first = true;
  auto consider = [&](const StrategyProfile& profile, Cost social) {
    ++best.explored;
    if (first || social < best.value) {
      best.value = social;
      best.profile = profile;
      first = false;
    }
  };
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    std::vector<StrategyIndex> choices(n);
    for (PlayerId i = 0; i < n; ++i) choices[i] = static_cast<StrategyIndex>(uniform_below(rng, game.strategies(i).size()));
    StrategyProfile profile(std::move(choices));
    CongestionVector loads = congestion_vector(game, profile);
    consider(profile, social_cost_from_loads(game, loads));
    bool moved = true;
    while (moved) {
      moved = false;
      for (PlayerId i = 0; i < n; ++i) {
        const BestResponse br = best_response(game, profile, loads, i);
        if (!br.improving) continue;
        for (ResourceId e : game.strategy(i, profile[i])) --loads[e];
        for (ResourceId e : game.strategy(i, br.index)) ++loads[e];
        profile.set(i, br.index);
        consider(profile, social_cost_from_loads(game, loads));
        moved = true;
      }
    }
  }
  return best;
}

NashVerdict is_nash(const CongestionGame& game, const StrategyProfile& profile) {
  const auto loads = congestion_vector(game, profile);
  for (PlayerId i = 0; i < game.num_players(); ++i) {
    const BestResponse br = best_response(game, profile, loads, i, LowestIndex{});
    if (br.improving) return {false, Deviation{i, br.index, br.current_cost, br.best_cost}};
  }
  return {true, std::nullopt};
}

std::vector<StrategyProfile> pure_nash_equilibria(const CongestionGame& game, std::uint64_t budget) {
  std::vector<StrategyProfile> found;
  enumerate_profiles(game, budget, [&](const StrategyProfile& profile, std::span<const Cost> loads, Cost) {
    if (!has_improving_move(game, profile, loads)) found.push_back(profile);
  });
  return found;
}

double RootBound::approx() const {
  return constant.convert_to<double>() + coeff1.convert_to<double>() * std::sqrt(radicand1.convert_to<double>()) +
         coeff2.convert_to<double>() * std::sqrt(radicand2.convert_to<double>());
}

std::string RootBound::text() const {
  std::ostringstream out;
  out << constant;
  if (coeff1 != 0) out << " + " << fmt_term(coeff1, radicand1);
  if (coeff2 != 0) out << " + " << fmt_term(coeff2, radicand2);
  return out.str();
}

std::string InequalityCheck::text() const {
  std::ostringstream out;
  out << name << ": " << lhs << " <= " << rhs.text();
  if (scale != 1) out << " (both sides / " << scale << ")";
  out << (holds ? "  ok" : "  VIOLATED");
  return out.str();
}

bool leq(const BigInt& lhs, const RootBound& rhs) {
  const BigInt d = lhs - rhs.constant;
  if (d <= 0) return true;
  const BigInt a = rhs.coeff1 * rhs.coeff1 * rhs.radicand1;
  const BigInt b = rhs.coeff2 * rhs.coeff2 * rhs.radicand2;
  // d <= √a + √b  ⇔  d² - a - b <= 2√(ab)
  const BigInt e = d * d - a - b;
  if (e <= 0) return true;
  return e * e <= 4 * a * b;
}

bool leq_contraction_chain(const BigInt& end_cost, const BigInt& opt, const Rational& x, unsigned k) {
  if (k == 0) throw std::invalid_argument("contraction chain needs k >= 1");
  const unsigned p = 1u << (k - 1);
  // (12 + 8√2)^p = u + v√2
  BigInt u = 1, v = 0;
  for (unsigned j = 0; j < p; ++j) {
    const BigInt nu = 12 * u + 16 * v;
    const BigInt nv = 8 * u + 12 * v;
    u = nu;
    v = nv;
  }
  const BigInt num = boost::multiprecision::numerator(x);
  const BigInt den = boost::multiprecision::denominator(x);
  // end^p · den <= (u + v√2) · num · opt^p
  BigInt lhs = den;
  BigInt w = num;
  for (unsigned j = 0; j < p; ++j) {
    lhs *= end_cost;
    w *= opt;
  }
  const BigInt d = lhs - u * w;
  if (d <= 0) return true;
  return d * d <= 2 * v * v * w * w;
}

std::optional<Rational> CoveringQuantities::gamma(std::size_t players) const {
  if (!n_gamma) return std::nullopt;
  return Rational(big(*n_gamma), big(static_cast<Cost>(players)));
}

CoveringQuantities covering_quantities(const CongestionGame& game, const MoveTrace& trace, std::size_t covering,
                                       const StrategyProfile& optimum) {
  return quantities_at(game, trace, covering, optimum, game.is_symmetric());
}

Cost rho(const CongestionGame& game, const MoveTrace& trace, std::size_t covering, const StrategyProfile& optimum) {
  return quantities_at(game, trace, covering, optimum, false).rho;
}

Cost h_value(const CongestionGame& game, const MoveTrace& trace, std::size_t covering, const StrategyProfile& optimum) {
  const auto q = quantities_at(game, trace, covering, optimum, false);
  if (q.h != q.h_resource_form)
    throw std::logic_error("H(R) double sum " + std::to_string(q.h) + " differs from resource form " +
                           std::to_string(q.h_resource_form));
  return q.h;
}

Rational gamma(const CongestionGame& game, const MoveTrace& trace, std::size_t covering,
               const StrategyProfile& optimum) {
  if (!game.is_symmetric()) throw ValidationError("Γ(R) is defined for symmetric games only");
  return *quantities_at(game, trace, covering, optimum, true).gamma(game.num_players());
}

bool CoveringReport::all_hold() const {
  return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck& c) { return c.holds; });
}

const InequalityCheck* CoveringReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (name == c.name) return &c;
  }
  return nullptr;
}

bool LemmaSuiteReport::all_hold() const {
  return std::all_of(coverings.begin(), coverings.end(), [](const CoveringReport& c) { return c.all_hold(); });
}

std::vector<const InequalityCheck*> LemmaSuiteReport::failures() const {
  std::vector<const InequalityCheck*> out;
  for (const auto& c : coverings) {
    for (const auto& check : c.checks) {
      if (!check.holds) out.push_back(&check);
    }
  }
  return out;
}

LemmaSuiteReport check_lemma_suite(const CongestionGame& game, const MoveTrace& trace,
                                   const OptimumCertificate& optimum, const FairnessSpec& spec,
                                   SuiteOptions options) {
  const std::size_t n = game.num_players();
  validate_profile(game, optimum.profile);
  if (options.symmetric && !game.is_symmetric())
    throw ValidationError("symmetric lemma checks requested for a non-symmetric game");
  const auto validation = validate_fairness(trace, n, options.asymmetric ? spec : FairnessSpec{spec.T, spec.T});
  for (std::size_t c = 0; c < validation.coverings.size(); ++c) {
    const auto& check = validation.coverings[c];
    if (!check.idle_players.empty())
      throw ValidationError("covering " + std::to_string(c) + " violates liveness (player " +
                            std::to_string(check.idle_players.front()) + " never moves)");
    if (!check.overactive_players.empty())
      throw ValidationError("covering " + std::to_string(c) + " violates fairness (player " +
                            std::to_string(check.overactive_players.front().first) + " moves " +
                            std::to_string(check.overactive_players.front().second) + " times)");
  }

  LemmaSuiteReport report;
  report.advisory = !optimum.exact || trace.mode != Mode::Strict;
  const OptimumData opt = optimum_data(game, optimum.profile);
  const BigInt OPT = big(optimum.value);
  const BigInt additive = big(static_cast<Cost>(4 * spec.beta + 1)) * OPT;
  StrategyProfile profile = trace.initial;
  CongestionVector loads = congestion_vector(game, profile);
  std::optional<Cost> previous_rho;

  const std::size_t coverings = trace.moves.size() / spec.T;
  report.coverings.reserve(coverings);
  for (std::size_t c = 0; c < coverings; ++c) {
    CoveringReport cr;
    cr.covering = c;
    cr.values = evaluate_covering(game, trace, c * spec.T, spec.T, profile, loads, opt, options.symmetric);
    const CoveringQuantities& q = cr.values;
    if (optimum.value > 0) cr.ratio = Rational(big(q.end_cost), OPT);

    auto& checks = cr.checks;
    checks.push_back(equality_check("h_forms_agree", q.h, q.h_resource_form));
    checks.push_back(make_check("sandwich_lower", big(q.end_potential), RootBound{big(q.end_cost)}));
    checks.push_back(make_check("sandwich_upper", big(q.end_cost), RootBound{2 * big(q.end_potential)}));
    if (options.asymmetric) {
      if (trace.mode == Mode::Strict) {
        checks.push_back(make_check("rho_bounds_last_moves", big(q.last_move_costs), RootBound{big(q.rho)}));
      }
      checks.push_back(make_check("lemma3", big(q.end_cost), RootBound{2 * big(q.rho)}));
      checks.push_back(make_check("lemma2", big(q.end_overlap), RootBound{0, 1, 2 * big(q.rho) * OPT}));
      checks.push_back(make_check("lemma4", big(q.rho), RootBound{2 * big(q.h) + additive}));
      if (c == 0) {
        checks.push_back(make_check("rho_first_covering", big(q.rho),
                                    RootBound{big(static_cast<Cost>(n + 1)) * OPT}));
      }
      if (previous_rho) {
        checks.push_back(make_check("lemma5", big(q.rho), RootBound{additive, 2, 2 * big(*previous_rho) * OPT}));
      }
    }
    if (options.symmetric) {
      const BigInt players = big(static_cast<Cost>(n));
      if (trace.mode == Mode::Strict) {
        checks.push_back(make_check("gamma_bounds_last_moves", players * big(q.last_move_costs),
                                    RootBound{big(*q.n_gamma)}, players));
      }
      checks.push_back(make_check("symmetric_gamma", players * big(q.end_cost), RootBound{2 * big(*q.n_gamma)}, players));
      const BigInt radicand = big(q.start_cost) * OPT;
      checks.push_back(make_check("symmetric_contraction", big(q.end_cost), RootBound{0, 2, radicand, 2, 2 * radicand}));
    }
    previous_rho = q.rho;
    report.coverings.push_back(std::move(cr));
  }
  return report;
}

RatioCurve theorem1_ratio_curve(const CongestionGame& game, const MoveTrace& trace, const OptimumCertificate& optimum,
                                const FairnessSpec& spec, const Rational& c) {
  if (spec.T == 0 || trace.moves.size() % spec.T != 0)
    throw ValidationError("trace length is not a multiple of T=" + std::to_string(spec.T));
  RatioCurve curve;
  const BigInt OPT = big(optimum.value);
  const Rational bound = c * Rational(static_cast<long long>(spec.beta));
  std::optional<Cost> previous;
  StrategyProfile profile = trace.initial;
  for (std::size_t j = 0; j < trace.moves.size() / spec.T; ++j) {
    for (std::size_t t = j * spec.T; t < (j + 1) * spec.T; ++t) profile.set(trace.moves[t].player, trace.moves[t].strategy);
    const Cost end = social_cost(game, profile);
    CurvePoint point;
    point.covering = j;
    if (optimum.value > 0) point.ratio = Rational(big(end), OPT);
    point.within_c_beta = Rational(big(end)) <= bound * Rational(OPT);
    if (previous) {
      point.chain = make_check("ratio_chain", big(end),
                               RootBound{big(static_cast<Cost>(4 * spec.beta + 1)) * OPT, 2, 2 * big(*previous) * OPT});
    }
    if (point.within_c_beta && !curve.first_within_c_beta) curve.first_within_c_beta = j;
    previous = end;
    curve.points.push_back(std::move(point));
  }
  return curve;
}

std::size_t loglog_coverings(std::size_t n) {
  // smallest k with 2^(2^k) >= n
  std::size_t k = 0;
  while (k < 6 && (std::uint64_t{1} << (std::uint64_t{1} << k)) < n) ++k;
  return std::max<std::size_t>(k, 1);
}

std::size_t lnln_coverings(std::size_t n) {
  if (n < 3) return 1;
  const double v = std::ceil(std::log(std::log(static_cast<double>(n))));
  return std::max<std::size_t>(static_cast<std::size_t>(std::max(v, 0.0)), 1);
}

}  // namespace cdl
