#include "cdl/experiment.hpp"

#include "cdl/analysis.hpp"

#include <algorithm>
#include <sstream>

namespace cdl {

namespace {

constexpr const char* kMarginChecks[] = {"lemma3", "lemma2", "lemma4", "lemma5", "symmetric_gamma",
                                         "symmetric_contraction"};

std::size_t coverings_for(const std::string& rule, std::size_t n) {
  if (rule == "loglog") return loglog_coverings(n);
  if (rule == "lnln") return lnln_coverings(n);
  std::size_t pos = 0;
  std::size_t value = 0;
  try {
    value = std::stoull(rule, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != rule.size() || value == 0) throw ValidationError("coverings must be loglog, lnln or a positive count, got " + rule);
  return value;
}

Rational read_rational(const Json& json, const std::string& where) {
  if (json.is_number_integer()) return Rational(json.get<std::int64_t>());
  if (json.is_string()) return parse_rational(json.get<std::string>());
  throw FormatError(where + ": expected an integer or a \"p/q\" string");
}

std::string margin_text(const InequalityCheck* check) {
  if (!check) return "";
  const Rational lhs = check->lhs_value();
  const double margin = check->rhs.approx() / check->scale.convert_to<double>() - to_double(lhs);
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(6);
  out << margin;
  return out.str();
}

}  // namespace

std::string decimal(const Rational& value, unsigned places) {
  BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  const bool negative = num < 0;
  if (negative) num = -num;
  BigInt scale = 1;
  for (unsigned i = 0; i < places; ++i) scale *= 10;
  const BigInt scaled = (num * scale * 2 + den) / (den * 2);  // round half up
  std::string digits = scaled.str();
  if (digits.size() <= places) digits.insert(0, places + 1 - digits.size(), '0');
  std::string out = digits.substr(0, digits.size() - places);
  if (places > 0) out += "." + digits.substr(digits.size() - places);
  return negative && scaled != 0 ? "-" + out : out;
}

ExperimentConfig experiment_config_from_json(const Json& json) {
  if (!json.is_object()) throw FormatError("experiment config: top level must be an object");
  ExperimentConfig config;
  if (json.contains("budget")) config.budget = json.at("budget").get<std::uint64_t>();
  const Json experiments = json.value("experiments", Json::array());
  if (!experiments.is_array()) throw FormatError("experiment config: \"experiments\" must be an array");
  for (std::size_t x = 0; x < experiments.size(); ++x) {
    const Json& e = experiments[x];
    const std::string where = "experiment " + std::to_string(x);
    try {
      ExperimentSpec spec;
      spec.name = e.at("name").get<std::string>();
      if (spec.name.empty() || spec.name.find_first_of("/\\") != std::string::npos)
        throw FormatError(where + ": name must be a plain file stem");
      const Json g = e.value("generator", Json::object());
      spec.generator.players = g.value("n", spec.generator.players);
      spec.generator.resources = g.value("m", spec.generator.resources);
      spec.generator.max_strategies = g.value("max_strategies", spec.generator.max_strategies);
      spec.generator.max_strategy_size = g.value("max_strategy_size", spec.generator.max_strategy_size);
      spec.generator.max_a = g.value("max_a", spec.generator.max_a);
      spec.generator.max_b = g.value("max_b", spec.generator.max_b);
      spec.generator.symmetric = g.value("symmetric", false);
      spec.generator.validate();
      if (e.contains("betas")) spec.betas = e.at("betas").get<std::vector<std::size_t>>();
      if (e.contains("T") && !e.at("T").is_null()) {
        if (e.at("T").is_string()) {
          if (e.at("T").get<std::string>() != "auto") throw FormatError(where + ": T must be \"auto\" or an integer");
        } else {
          spec.T = e.at("T").get<std::size_t>();
        }
      }
      if (e.contains("coverings")) {
        const Json& c = e.at("coverings");
        spec.coverings = c.is_string() ? c.get<std::string>() : std::to_string(c.get<std::size_t>());
      }
      coverings_for(spec.coverings, spec.generator.players);
      spec.seeds = e.value("seeds", spec.seeds);
      spec.seed_base = e.value("seed_base", spec.seed_base);
      if (e.contains("ratio_slope")) spec.ratio_slope = read_rational(e.at("ratio_slope"), where + " ratio_slope");
      if (e.contains("ratio_offset")) spec.ratio_offset = read_rational(e.at("ratio_offset"), where + " ratio_offset");
      config.experiments.push_back(std::move(spec));
    } catch (const Json::exception& err) {
      throw FormatError(where + ": " + err.what());
    } catch (const std::invalid_argument& err) {
      throw FormatError(where + ": " + err.what());
    } catch (const ValidationError& err) {
      throw FormatError(where + ": " + err.what());
    }
  }
  return config;
}

std::size_t ExperimentSummary::total_violations() const {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.violations;
  return total;
}

std::size_t ExperimentSummary::total_errors() const {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.errors;
  return total;
}

std::size_t ExperimentSummary::total_bound_failures() const {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.bound_failures;
  return total;
}

ExperimentSummary run_experiments(const ExperimentConfig& config, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  ExperimentSummary summary;
  for (const ExperimentSpec& spec : config.experiments) {
    const std::size_t n = spec.generator.players;
    const std::size_t coverings = coverings_for(spec.coverings, n);
    std::ostringstream csv;
    csv << "seed,n,T,beta,covering,ratio,end_cost,opt";
    for (const char* name : kMarginChecks) csv << ',' << name << "_margin";
    csv << ",status\n";

    std::vector<BetaSummary> rows;
    for (std::size_t beta : spec.betas) {
      BetaSummary row;
      row.experiment = spec.name;
      row.beta = beta;
      row.T = spec.T ? *spec.T : ((beta + 1) * n + 1) / 2;
      row.bound = spec.ratio_slope * Rational(static_cast<long long>(beta)) + spec.ratio_offset;
      rows.push_back(row);
    }

    for (std::size_t s = 0; s < spec.seeds; ++s) {
      const std::uint64_t seed = spec.seed_base + s;
      std::optional<CongestionGame> game;
      std::optional<OptimumCertificate> opt;
      std::string setup_error;
      try {
        game.emplace(random_game(spec.generator, seed));
        opt.emplace(compute_opt(*game, config.budget));
      } catch (const std::exception& err) {
        setup_error = err.what();
      }
      for (BetaSummary& row : rows) {
        ++row.runs;
        if (!setup_error.empty()) {
          ++row.errors;
          csv << seed << ',' << n << ',' << row.T << ',' << row.beta << ",,,,,,,,,,,\"error: " << setup_error << "\"\n";
          continue;
        }
        try {
          const StrategyProfile initial = random_profile(*game, seed ^ 0x9e3779b97f4a7c15ULL);
          const FairnessSpec fair{row.T, row.beta};
          const MoveTrace trace = run_dynamics(*game, initial, RandomFair{fair, seed}, coverings);
          const LemmaSuiteReport report =
              check_lemma_suite(*game, trace, *opt, fair, SuiteOptions{true, game->is_symmetric()});
          for (const CoveringReport& cr : report.coverings) {
            const Rational ratio = cr.ratio ? *cr.ratio : Rational(1);
            csv << seed << ',' << n << ',' << row.T << ',' << row.beta << ',' << cr.covering << ',' << decimal(ratio)
                << ',' << cr.values.end_cost << ',' << opt->value;
            for (const char* name : kMarginChecks) csv << ',' << margin_text(cr.find(name));
            const bool ok = cr.all_hold();
            csv << ',' << (ok ? "ok" : "violation") << '\n';
            if (!report.advisory) {
              for (const InequalityCheck& c : cr.checks) row.violations += c.holds ? 0 : 1;
            }
          }
          if (!report.coverings.empty()) {
            const auto& last = report.coverings.back();
            const Rational ratio = last.ratio ? *last.ratio : Rational(1);
            if (ratio > row.worst_final_ratio) row.worst_final_ratio = ratio;
            if (ratio > row.bound) ++row.bound_failures;
          }
        } catch (const std::exception& err) {
          ++row.errors;
          csv << seed << ',' << n << ',' << row.T << ',' << row.beta << ",,,,,,,,,,,\"error: " << err.what() << "\"\n";
        }
      }
    }
    write_text_file(out / (spec.name + ".csv"), csv.str());
    summary.rows.insert(summary.rows.end(), rows.begin(), rows.end());
  }

  std::ostringstream text;
  text << "experiment,beta,T,runs,errors,violations,worst_final_ratio,bound,bound_failures\n";
  for (const BetaSummary& r : summary.rows) {
    text << r.experiment << ',' << r.beta << ',' << r.T << ',' << r.runs << ',' << r.errors << ',' << r.violations << ','
         << decimal(r.worst_final_ratio) << ',' << to_string(r.bound) << ',' << r.bound_failures << '\n';
  }
  write_text_file(out / "summary.csv", text.str());
  return summary;
}

}  // namespace cdl
