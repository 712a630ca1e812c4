#pragma once

#include "cdl/generate.hpp"
#include "cdl/io.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cdl {

/// One batch: for every seed a random game, its optimum and a random initial
/// profile, then one strict random-fair run per β.
struct ExperimentSpec {
  std::string name;
  RandomGameSpec generator;
  std::vector<std::size_t> betas{1};
  /// Covering length; nullopt means ⌈(β+1)·n/2⌉.
  std::optional<std::size_t> T;
  /// "loglog" (⌈log₂log₂ n⌉), "lnln" (⌈ln ln n⌉) or a decimal count.
  std::string coverings = "loglog";
  std::size_t seeds = 10;
  std::uint64_t seed_base = 0;
  /// The final ratio is checked against ratio_slope·β + ratio_offset.
  Rational ratio_slope = 4;
  Rational ratio_offset = 1;
};

struct ExperimentConfig {
  std::vector<ExperimentSpec> experiments;
  std::uint64_t budget = 20'000'000;
};

ExperimentConfig experiment_config_from_json(const Json& json);

struct BetaSummary {
  std::string experiment;
  std::size_t beta = 0;
  std::size_t T = 0;
  std::size_t runs = 0;
  std::size_t errors = 0;       // rows that could not be evaluated
  std::size_t violations = 0;   // failed inequality checks
  std::size_t bound_failures = 0;  // final ratio above slope·β + offset
  Rational worst_final_ratio = 0;
  Rational bound = 0;
};

struct ExperimentSummary {
  std::vector<BetaSummary> rows;
  std::size_t total_violations() const;
  std::size_t total_errors() const;
  std::size_t total_bound_failures() const;
};

/// Writes `<out>/<name>.csv` per experiment and `<out>/summary.csv`.
ExperimentSummary run_experiments(const ExperimentConfig& config, const std::filesystem::path& out);

/// Fixed-point rendering with 9 decimals, computed exactly from the rational.
std::string decimal(const Rational& value, unsigned places = 9);

}  // namespace cdl
