#pragma once

#include "cdl/dynamics.hpp"
#include "cdl/game.hpp"
#include "cdl/reductions.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cdl {

using Json = nlohmann::json;

/// Raised for unreadable or malformed files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// In-memory form of a game file: coefficients as written (possibly rational).
struct GameDocument {
  RationalGame game;
  Json meta = Json::object();
};

/// A game file after scaling to integer coefficients and strategy dedup.
struct LoadedGame {
  CongestionGame game;
  BigInt scale = 1;
  Json meta = Json::object();
  std::vector<std::string> warnings;
};

/// Canonical JSON: sorted keys, integers as numbers, other rationals as "p/q".
Json game_to_json(const GameDocument& doc);
Json game_to_json(const CongestionGame& game, Json meta = Json::object());
GameDocument game_from_json(const Json& json);
LoadedGame load_game(const GameDocument& doc);

std::string canonical_text(const Json& json);
/// Hex SHA-256 of the canonical text of the game (meta excluded).
std::string game_hash(const CongestionGame& game);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
LoadedGame read_game_file(const std::filesystem::path& path);

struct ScheduleDocument {
  StrategyProfile initial;
  Scripted script;
  std::size_t coverings = 1;
  Json meta = Json::object();
};

Json schedule_to_json(const ScheduleDocument& doc);
ScheduleDocument schedule_from_json(const Json& json);

/// Metadata sidecar of a trace CSV.
struct TraceMeta {
  std::optional<std::uint64_t> seed;
  std::string policy;
  std::size_t T = 1;
  std::size_t beta = 1;
  std::string game_hash;
  StrategyProfile initial;
  Mode mode = Mode::Strict;
  std::string tie = "keep-current";
  std::size_t coverings = 0;
};

inline constexpr const char* kTraceHeader =
    "step,covering,player,strategy_index,pre_cost,post_cost,flag,social_cost,potential";

void write_trace_csv(std::ostream& out, const MoveTrace& trace);
std::string trace_csv(const MoveTrace& trace);
/// Parses rows; `previous` is reconstructed from `initial`.
MoveTrace read_trace_csv(std::istream& in, const StrategyProfile& initial, std::size_t covering_length, Mode mode);

Json trace_meta_to_json(const TraceMeta& meta);
TraceMeta trace_meta_from_json(const Json& json);

/// The sidecar path for a trace CSV: same name with ".meta.json" appended.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Loads a trace CSV and its sidecar.
std::pair<MoveTrace, TraceMeta> read_trace_files(const std::filesystem::path& csv);

}  // namespace cdl
