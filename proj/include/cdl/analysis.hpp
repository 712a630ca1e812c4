#pragma once

#include "cdl/dynamics.hpp"
#include "cdl/game.hpp"
#include "cdl/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cdl {

inline constexpr std::uint64_t kDefaultOptBudget = 20'000'000;

class BudgetExceeded : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct OptimumCertificate {
  StrategyProfile profile;
  Cost value = 0;
  std::uint64_t explored = 0;
  /// False when `value` is only an upper bound on OPT.
  bool exact = true;
};

/// Exhaustive enumeration of all profiles. Throws BudgetExceeded when the
/// profile space is larger than `budget`.
OptimumCertificate compute_opt(const CongestionGame& game, std::uint64_t budget = kDefaultOptBudget);

/// Best-response descent from `restarts` random profiles; the result is an
/// upper bound only (exact == false).
OptimumCertificate heuristic_opt(const CongestionGame& game, std::uint64_t seed, std::size_t restarts = 16);

struct Deviation {
  PlayerId player;
  StrategyIndex strategy;
  Cost current_cost;
  Cost deviation_cost;
};

struct NashVerdict {
  bool nash;
  std::optional<Deviation> witness;  // lowest (player, strategy) improving deviation
};

NashVerdict is_nash(const CongestionGame& game, const StrategyProfile& profile);

/// All pure Nash equilibria, by enumeration under the same budget rule as compute_opt.
std::vector<StrategyProfile> pure_nash_equilibria(const CongestionGame& game, std::uint64_t budget = kDefaultOptBudget);

/// constant + coeff1·√radicand1 + coeff2·√radicand2 with nonnegative terms.
/// Irrational bounds are compared exactly by squaring.
struct RootBound {
  BigInt constant = 0;
  BigInt coeff1 = 0;
  BigInt radicand1 = 0;
  BigInt coeff2 = 0;
  BigInt radicand2 = 0;

  double approx() const;
  std::string text() const;
};

/// Exact test of lhs <= rhs.
bool leq(const BigInt& lhs, const RootBound& rhs);

/// Exact test of end_cost/opt <= (2+2√2)^2 · x^(1/2^(k-1)), the closed form
/// of iterating the symmetric contraction over k coverings starting from
/// ratio x. Requires k >= 1; evaluated multiplied through by opt^(2^(k-1)).
bool leq_contraction_chain(const BigInt& end_cost, const BigInt& opt, const Rational& x, unsigned k);

/// One inequality lhs/scale <= rhs/scale. Every bound is multiplied through
/// by OPT (and by n for Γ) so both sides are integers and OPT = 0 needs no
/// special case.
struct InequalityCheck {
  const char* name = "";
  BigInt lhs = 0;
  RootBound rhs;
  BigInt scale = 1;
  bool holds = false;

  Rational lhs_value() const { return Rational(lhs, scale); }
  std::string text() const;
};

/// Per-covering functionals. ρ, H and the Cauchy-Schwarz overlap are defined
/// for identity-delay games; for affine games they are evaluated on the
/// identity reduction (A_e copies carry a_e·n_e, each B^i_e copy carries b_e
/// times player i's own use of e), which coincides with the plain formulas
/// when every delay is f(x) = x.
struct CoveringQuantities {
  Cost start_cost = 0;        // C(S^0)
  Cost end_cost = 0;          // C(S^T)
  Cost start_potential = 0;   // Φ(S^0)
  Cost end_potential = 0;     // Φ(S^T)
  Cost rho = 0;
  Cost h = 0;                 // double-summation form
  Cost h_resource_form = 0;   // Σ_e n_e(S^0) n_e(S*)
  Cost end_overlap = 0;       // Σ_e n_e(S^T) n_e(S*)
  Cost last_move_costs = 0;   // Σ_i c_i(S^last(i))
  std::optional<Cost> n_gamma;    // n·Γ(R), symmetric games only

  std::optional<Rational> gamma(std::size_t players) const;
};

/// Throws ValidationError if the covering is not live (some last(i) undefined).
CoveringQuantities covering_quantities(const CongestionGame& game, const MoveTrace& trace, std::size_t covering,
                                       const StrategyProfile& optimum);

Cost rho(const CongestionGame& game, const MoveTrace& trace, std::size_t covering, const StrategyProfile& optimum);
Cost h_value(const CongestionGame& game, const MoveTrace& trace, std::size_t covering, const StrategyProfile& optimum);
/// Throws ValidationError for non-symmetric games.
Rational gamma(const CongestionGame& game, const MoveTrace& trace, std::size_t covering,
               const StrategyProfile& optimum);

struct CoveringReport {
  std::size_t covering = 0;
  CoveringQuantities values;
  std::optional<Rational> ratio;  // C(S^T)/OPT, absent when OPT = 0
  std::vector<InequalityCheck> checks;

  bool all_hold() const;
  const InequalityCheck* find(std::string_view name) const;
};

struct LemmaSuiteReport {
  std::vector<CoveringReport> coverings;
  /// Verdicts are theorem-grade only for exact OPT on strict-mode traces.
  bool advisory = false;
  bool all_hold() const;
  std::vector<const InequalityCheck*> failures() const;
};

struct SuiteOptions {
  /// Run the (T,β)-fairness lemma family (requires a fair trace).
  bool asymmetric = true;
  /// Run Γ and the symmetric contraction lemma (requires a symmetric game).
  bool symmetric = false;
};

/// Validates the trace against `spec` (fairness for the asymmetric family,
/// liveness for the symmetric one) and evaluates every inequality on every
/// covering; pairs of consecutive coverings feed the ρ-contraction check.
LemmaSuiteReport check_lemma_suite(const CongestionGame& game, const MoveTrace& trace,
                                   const OptimumCertificate& optimum, const FairnessSpec& spec,
                                   SuiteOptions options = {});

struct CurvePoint {
  std::size_t covering = 0;
  std::optional<Rational> ratio;
  bool within_c_beta = false;
  /// ratio <= 2√2·√(previous ratio) + 4β + 1, multiplied through by OPT;
  /// absent for the first covering.
  std::optional<InequalityCheck> chain;
};

struct RatioCurve {
  std::vector<CurvePoint> points;
  std::optional<std::size_t> first_within_c_beta;
};

RatioCurve theorem1_ratio_curve(const CongestionGame& game, const MoveTrace& trace, const OptimumCertificate& optimum,
                                const FairnessSpec& spec, const Rational& c);

/// ⌈log2 log2 n⌉, at least 1.
std::size_t loglog_coverings(std::size_t n);
/// ⌈ln ln n⌉, at least 1.
std::size_t lnln_coverings(std::size_t n);

}  // namespace cdl
