#pragma once

#include "cdl/generate.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace cdl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolation = 2;
inline constexpr int kExitIllegalSchedule = 3;

struct GenOptions {
  std::string kind = "random";  // random | lowerbound-gprime | corollary
  RandomGameSpec random;
  std::uint64_t seed = 0;
  std::size_t beta = 16;
  std::size_t levels = 1;
  std::uint64_t m = 0;  // 0 means the smallest feasible value
  std::size_t n_target = 256;
  std::size_t coverings = 1;
  std::filesystem::path out;
  std::optional<std::filesystem::path> schedule_out;  // default: <out>.schedule.json
};

struct RunOptions {
  std::filesystem::path game;
  std::string policy = "round-robin";  // round-robin | random-fair | scripted
  std::size_t T = 0;                   // random-fair
  std::size_t beta = 1;                // random-fair
  std::uint64_t seed = 0;
  std::size_t coverings = 1;
  std::string mode = "strict";
  std::string tie = "keep-current";  // keep-current | lowest-index
  std::optional<std::filesystem::path> schedule;
  std::string initial = "zeros";  // zeros | random | comma-separated indices
  std::filesystem::path out;
};

struct AnalyzeOptions {
  std::filesystem::path game;
  std::filesystem::path trace;
  bool heuristic_opt = false;
  std::optional<std::string> opt_profile;  // comma-separated reference optimum
  std::optional<std::filesystem::path> csv;
  std::uint64_t budget = 20'000'000;
};

struct ExperimentOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::uint64_t budget = 20'000'000;
};

/// Each command reports to `out`, diagnostics to `err`, and returns the exit code.
int cmd_gen(const GenOptions& options, std::ostream& out, std::ostream& err);
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);
int cmd_experiment(const ExperimentOptions& options, std::ostream& out, std::ostream& err);

/// CDL_BUDGET if set and valid, else `fallback`.
std::uint64_t budget_from_env(std::uint64_t fallback);

}  // namespace cdl::cli
