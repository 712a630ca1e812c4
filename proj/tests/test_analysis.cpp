#include "cdl/analysis.hpp"
#include "cdl/generate.hpp"
#include "cdl/reductions.hpp"
#include "oracles.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

using namespace cdl;
using Float = boost::multiprecision::cpp_bin_float_100;

namespace {

MoveTrace fair_trace(const CongestionGame& g, std::uint64_t seed, const FairnessSpec& spec, std::size_t coverings) {
  return run_dynamics(g, random_profile(g, seed + 1), RandomFair{spec, seed}, coverings);
}

/// The trace with every strategy index replaced by its image under the map.
MoveTrace map_trace(const ReductionMap& map, const MoveTrace& trace) {
  MoveTrace out = trace;
  out.initial = map.map_profile(trace.initial);
  for (Move& m : out.moves) {
    m.previous = map.map_strategy(m.player, m.previous);
    m.strategy = map.map_strategy(m.player, m.strategy);
  }
  return out;
}

}  // namespace

TEST_CASE("compute_opt agrees with recursive enumeration") {
  Rng rng(21);
  for (int round = 0; round < 200; ++round) {
    const CongestionGame g = oracle::small_game(rng, 5, 5, 3);
    const OptimumCertificate opt = compute_opt(g);
    CHECK(opt.exact);
    CHECK(opt.value == oracle::brute_opt(g));
    CHECK(oracle::social_cost(g, opt.profile) == opt.value);
    CHECK(opt.explored == g.profile_space_size());
    const OptimumCertificate h = heuristic_opt(g, round, 4);
    CHECK_FALSE(h.exact);
    CHECK(h.value >= opt.value);
    CHECK(oracle::social_cost(g, h.profile) == h.value);
  }
}

TEST_CASE("compute_opt refuses profile spaces above the budget") {
  RandomGameSpec spec;
  spec.players = 6;
  spec.max_strategies = 4;
  const CongestionGame g = random_game(spec, 3);
  CHECK_THROWS_AS(compute_opt(g, g.profile_space_size() - 1), BudgetExceeded);
  CHECK_NOTHROW(compute_opt(g, g.profile_space_size()));
}

TEST_CASE("Nash detection and enumeration agree with the oracle") {
  Rng rng(22);
  for (int round = 0; round < 200; ++round) {
    const CongestionGame g = oracle::small_game(rng, 4, 4, 3);
    const StrategyProfile s = oracle::random_profile(rng, g);
    const NashVerdict v = is_nash(g, s);
    CHECK(v.nash == oracle::is_nash(g, s));
    if (!v.nash) {
      REQUIRE(v.witness.has_value());
      const Deviation& d = *v.witness;
      CHECK(oracle::player_cost(g, oracle::with(s, d.player, d.strategy), d.player) < oracle::player_cost(g, s, d.player));
    }
    const auto all = pure_nash_equilibria(g);
    CHECK_FALSE(all.empty());  // potential games always have one
    for (const auto& eq : all) CHECK(oracle::is_nash(g, eq));
  }
  const auto g = oracle::identity_game(2, {{{0}, {1}}, {{0}, {1}}});
  CHECK(pure_nash_equilibria(g) == std::vector<StrategyProfile>{StrategyProfile({1, 0}), StrategyProfile({0, 1})});
}

TEST_CASE("exact root comparisons") {
  CHECK(leq(5, RootBound{0, 1, 25}));
  CHECK_FALSE(leq(6, RootBound{0, 1, 25}));
  CHECK(leq(5, RootBound{0, 1, 4, 1, 9}));
  CHECK_FALSE(leq(6, RootBound{0, 1, 4, 1, 9}));
  CHECK(leq(5, RootBound{1, 1, 2, 1, 8}));  // 1 + 3√2 ≈ 5.24
  CHECK_FALSE(leq(6, RootBound{1, 1, 2, 1, 8}));
  CHECK(leq(-3, RootBound{}));
  CHECK_FALSE(leq(1, RootBound{}));

  Rng rng(23);
  for (int round = 0; round < 5000; ++round) {
    const RootBound r{BigInt(uniform_between(rng, 0, 50)), BigInt(uniform_between(rng, 0, 5)),
                      BigInt(uniform_between(rng, 0, 400)), BigInt(uniform_between(rng, 0, 5)),
                      BigInt(uniform_between(rng, 0, 400))};
    const BigInt lhs = uniform_between(rng, 0, 250);
    const Float value = Float(r.constant) + Float(r.coeff1) * sqrt(Float(r.radicand1)) +
                        Float(r.coeff2) * sqrt(Float(r.radicand2));
    const Float diff = value - Float(lhs);
    if (abs(diff) < Float("1e-60")) {
      CHECK(leq(lhs, r));  // exact equality
    } else {
      CHECK(leq(lhs, r) == (diff > 0));
    }
  }
}

TEST_CASE("contraction chain closed form") {
  Rng rng(24);
  for (int round = 0; round < 3000; ++round) {
    const unsigned k = 1 + static_cast<unsigned>(uniform_below(rng, 3));
    const BigInt opt = uniform_between(rng, 1, 40);
    const BigInt end = uniform_between(rng, 0, 4000);
    const Rational x(uniform_between(rng, 1, 200), uniform_between(rng, 1, 20));
    const Float xf = Float(boost::multiprecision::numerator(x)) / Float(boost::multiprecision::denominator(x));
    const Float bound = (12 + 8 * sqrt(Float(2))) * pow(xf, Float(1) / Float(1u << (k - 1)));
    const Float diff = bound - Float(end) / Float(opt);
    if (abs(diff) > Float("1e-60")) CHECK(leq_contraction_chain(end, opt, x, k) == (diff > 0));
  }
  CHECK(leq_contraction_chain(0, 1, Rational(1), 1));
  CHECK_THROWS_AS(leq_contraction_chain(0, 1, Rational(1), 0), std::invalid_argument);
}

TEST_CASE("rho and H match the definitions on identity-delay games") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    RandomGameSpec spec;
    spec.players = 2 + seed % 4;
    spec.resources = 2 + seed % 5;
    spec.max_a = 1;
    spec.max_b = 0;
    CongestionGame raw = random_game(spec, seed);
    const CongestionGame g(std::vector<Delay>(raw.num_resources(), Delay{1, 0}), raw.strategy_sets());
    const FairnessSpec fair{spec.players + seed % 3, 2};
    const MoveTrace trace = fair_trace(g, seed, fair, 3);
    const OptimumCertificate opt = compute_opt(g);
    for (std::size_t c = 0; c < 3; ++c) {
      const CoveringQuantities q = covering_quantities(g, trace, c, opt.profile);
      CHECK(q.rho == oracle::rho(g, trace, c, opt.profile));
      CHECK(q.h == oracle::h(g, trace, c, opt.profile));
      CHECK(h_value(g, trace, c, opt.profile) == q.h);
      CHECK(rho(g, trace, c, opt.profile) == q.rho);
      CHECK(q.end_cost == oracle::social_cost(g, trace.profile_after((c + 1) * fair.T)));
      Cost overlap = 0;
      const StrategyProfile end = trace.profile_after((c + 1) * fair.T);
      for (ResourceId e = 0; e < g.num_resources(); ++e)
        overlap += oracle::congestion(g, end, e) * oracle::congestion(g, opt.profile, e);
      CHECK(q.end_overlap == overlap);
    }
  }
}

TEST_CASE("affine rho and H equal their values on the explicit identity reduction") {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    RandomGameSpec spec;
    spec.players = 2 + seed % 4;
    spec.resources = 2 + seed % 4;
    spec.max_a = 3;
    spec.max_b = 3;
    const CongestionGame g = random_game(spec, seed);
    const FairnessSpec fair{spec.players + 1, 2};
    const MoveTrace trace = fair_trace(g, seed, fair, 2);
    const OptimumCertificate opt = compute_opt(g);
    const ReductionMap map = reduce_to_identity(g);
    const MoveTrace lifted = map_trace(map, trace);
    const StrategyProfile opt_image = map.map_profile(opt.profile);
    for (std::size_t c = 0; c < 2; ++c) {
      const CoveringQuantities q = covering_quantities(g, trace, c, opt.profile);
      CHECK(q.rho == oracle::rho(map.target(), lifted, c, opt_image));
      CHECK(q.h == oracle::h(map.target(), lifted, c, opt_image));
      CHECK(q.h == q.h_resource_form);
    }
  }
}

TEST_CASE("Gamma matches the definition on symmetric games") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomGameSpec spec;
    spec.players = 2 + seed % 4;
    spec.resources = 2 + seed % 4;
    spec.symmetric = true;
    const CongestionGame g = random_game(spec, seed);
    const MoveTrace trace = fair_trace(g, seed, {spec.players + 2, 3}, 2);
    const OptimumCertificate opt = compute_opt(g);
    for (std::size_t c = 0; c < 2; ++c) {
      const CoveringQuantities q = covering_quantities(g, trace, c, opt.profile);
      REQUIRE(q.n_gamma.has_value());
      CHECK(*q.n_gamma == oracle::n_gamma(g, trace, c, opt.profile));
      CHECK(gamma(g, trace, c, opt.profile) == Rational(*q.n_gamma, static_cast<long long>(spec.players)));
    }
  }
  const auto asym = oracle::identity_game(2, {{{0}}, {{1}}});
  const MoveTrace t = run_dynamics(asym, StrategyProfile({0, 0}), RoundRobin{}, 1);
  CHECK_THROWS_AS(gamma(asym, t, 0, StrategyProfile({0, 0})), ValidationError);
}

TEST_CASE("lemma suite: every check holds on strict fair runs") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    RandomGameSpec spec;
    spec.players = 2 + seed % 5;
    spec.resources = 2 + seed % 5;
    spec.symmetric = seed % 3 == 0;
    const CongestionGame g = random_game(spec, seed);
    const std::size_t beta = 1 + seed % 3;
    const FairnessSpec fair{spec.players * (beta + 1) / 2 + (beta > 1 ? 1 : 0), beta};
    const MoveTrace trace = fair_trace(g, seed, fair, 3);
    const OptimumCertificate opt = compute_opt(g);
    const LemmaSuiteReport report = check_lemma_suite(g, trace, opt, fair, {true, g.is_symmetric()});
    CHECK_FALSE(report.advisory);
    REQUIRE(report.coverings.size() == 3);
    for (const auto& cr : report.coverings) {
      for (const auto& c : cr.checks) {
        INFO(c.text());
        CHECK(c.holds);
      }
    }
    CHECK(report.coverings[0].find("rho_first_covering") != nullptr);
    CHECK(report.coverings[0].find("lemma5") == nullptr);
    CHECK(report.coverings[1].find("lemma5") != nullptr);
    CHECK((report.coverings[0].find("symmetric_gamma") != nullptr) == g.is_symmetric());
    const InequalityCheck* l3 = report.coverings[1].find("lemma3");
    REQUIRE(l3 != nullptr);
    CHECK(l3->lhs == oracle::social_cost(g, trace.profile_after(2 * fair.T)));
  }
}

TEST_CASE("lemma suite refuses unfair traces and flags advisory inputs") {
  const auto g = oracle::identity_game(2, {{{0}, {1}}, {{0}, {1}}});
  const MoveTrace trace = run_dynamics(g, StrategyProfile({0, 0}), Scripted{{{0, 1}, {0, 1}}}, 1);
  const OptimumCertificate opt = compute_opt(g);
  CHECK_THROWS_AS(check_lemma_suite(g, trace, opt, {2, 2}), ValidationError);
  const MoveTrace rr = run_dynamics(g, StrategyProfile({0, 0}), RoundRobin{}, 2);
  OptimumCertificate loose = heuristic_opt(g, 1);
  CHECK(check_lemma_suite(g, rr, loose, {2, 1}).advisory);
  const LemmaSuiteReport exact = check_lemma_suite(g, rr, opt, {2, 1});
  CHECK_FALSE(exact.advisory);
  CHECK(exact.all_hold());
  CHECK(exact.failures().empty());
}

TEST_CASE("ratio curve against the c·beta band") {
  RandomGameSpec spec;
  spec.players = 5;
  const CongestionGame g = random_game(spec, 9);
  const FairnessSpec fair{7, 2};
  const MoveTrace trace = fair_trace(g, 9, fair, 4);
  const OptimumCertificate opt = compute_opt(g);
  const RatioCurve curve = theorem1_ratio_curve(g, trace, opt, fair, Rational(4));
  REQUIRE(curve.points.size() == 4);
  for (std::size_t j = 0; j < 4; ++j) {
    const Cost end = oracle::social_cost(g, trace.profile_after((j + 1) * fair.T));
    CHECK(*curve.points[j].ratio == Rational(end, opt.value));
    CHECK(curve.points[j].chain.has_value() == (j > 0));
    if (curve.points[j].chain) CHECK(curve.points[j].chain->holds);
  }
  CHECK(curve.first_within_c_beta.has_value());
}

TEST_CASE("covering count helpers") {
  CHECK(loglog_coverings(2) == 1);
  CHECK(loglog_coverings(4) == 1);
  CHECK(loglog_coverings(5) == 2);
  CHECK(loglog_coverings(16) == 2);
  CHECK(loglog_coverings(17) == 3);
  CHECK(loglog_coverings(256) == 3);
  CHECK(loglog_coverings(257) == 4);
  CHECK(lnln_coverings(2) == 1);
  CHECK(lnln_coverings(8) == 1);
  CHECK(lnln_coverings(16) == 2);
  CHECK(lnln_coverings(1000) == 2);
}
