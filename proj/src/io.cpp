#include "cdl/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace cdl {

namespace {

Json coefficient_json(const Rational& value) {
  if (boost::multiprecision::denominator(value) == 1) {
    const BigInt v = boost::multiprecision::numerator(value);
    if (v >= 0 && v <= std::numeric_limits<std::int64_t>::max()) return v.convert_to<std::int64_t>();
  }
  return to_string(value);
}

Rational coefficient_from_json(const Json& json, const std::string& where) {
  try {
    if (json.is_number_integer()) return Rational(json.get<std::int64_t>());
    if (json.is_string()) return parse_rational(json.get<std::string>());
  } catch (const std::exception& err) {
    throw FormatError(where + ": " + err.what());
  }
  throw FormatError(where + ": expected an integer or a \"p/q\" string");
}

template <typename T>
T field(const Json& json, const char* key, const std::string& where) {
  if (!json.is_object() || !json.contains(key)) throw FormatError(where + ": missing \"" + key + "\"");
  try {
    return json.at(key).get<T>();
  } catch (const Json::exception& err) {
    throw FormatError(where + ": bad \"" + key + "\": " + err.what());
  }
}

std::vector<StrategyIndex> profile_from_json(const Json& json, const std::string& where) {
  try {
    return json.get<std::vector<StrategyIndex>>();
  } catch (const Json::exception& err) {
    throw FormatError(where + ": " + err.what());
  }
}

}  // namespace

Json game_to_json(const GameDocument& doc) {
  Json resources = Json::array();
  for (const auto& d : doc.game.delays) resources.push_back({{"a", coefficient_json(d.a)}, {"b", coefficient_json(d.b)}});
  Json strategies = Json::array();
  for (const auto& set : doc.game.strategy_sets) strategies.push_back(set);
  bool symmetric = true;
  for (const auto& set : doc.game.strategy_sets) {
    std::vector<Strategy> a = set, b = doc.game.strategy_sets.front();
    for (auto& s : a) std::sort(s.begin(), s.end());
    for (auto& s : b) std::sort(s.begin(), s.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    if (a != b) symmetric = false;
  }
  return {{"meta", doc.meta},
          {"n", doc.game.strategy_sets.size()},
          {"resources", resources},
          {"strategies", strategies},
          {"symmetric", symmetric}};
}

Json game_to_json(const CongestionGame& game, Json meta) {
  GameDocument doc{to_rational(game), std::move(meta)};
  return game_to_json(doc);
}

GameDocument game_from_json(const Json& json) {
  if (!json.is_object()) throw FormatError("game file: top level must be an object");
  GameDocument doc;
  const auto n = field<std::size_t>(json, "n", "game file");
  const Json& resources = json.contains("resources") ? json.at("resources") : Json();
  if (!resources.is_array()) throw FormatError("game file: \"resources\" must be an array");
  for (std::size_t e = 0; e < resources.size(); ++e) {
    const std::string where = "resource " + std::to_string(e);
    const Json& r = resources[e];
    if (!r.is_object() || !r.contains("a") || !r.contains("b")) throw FormatError(where + ": needs \"a\" and \"b\"");
    doc.game.delays.push_back({coefficient_from_json(r.at("a"), where + " a"), coefficient_from_json(r.at("b"), where + " b")});
  }
  const Json& strategies = json.contains("strategies") ? json.at("strategies") : Json();
  if (!strategies.is_array()) throw FormatError("game file: \"strategies\" must be an array");
  if (strategies.size() != n)
    throw FormatError("game file: n=" + std::to_string(n) + " but " + std::to_string(strategies.size()) +
                      " strategy sets are listed");
  try {
    doc.game.strategy_sets = strategies.get<std::vector<std::vector<Strategy>>>();
  } catch (const Json::exception& err) {
    throw FormatError(std::string("game file: bad strategies: ") + err.what());
  }
  if (json.contains("meta")) doc.meta = json.at("meta");
  if (json.contains("symmetric")) {
    if (!json.at("symmetric").is_boolean()) throw FormatError("game file: \"symmetric\" must be a boolean");
    const bool declared = json.at("symmetric").get<bool>();
    const bool actual = game_to_json(doc).at("symmetric").get<bool>();
    if (declared != actual)
      throw FormatError(std::string("game file: declared symmetric=") + (declared ? "true" : "false") +
                        " but the strategy sets say otherwise");
  }
  return doc;
}

LoadedGame load_game(const GameDocument& doc) {
  ScaledGame scaled = scale_coefficients(doc.game);
  auto [game, warnings] = deduplicate_strategies(scaled.game);
  return {std::move(game), scaled.factor, doc.meta, std::move(warnings)};
}

std::string canonical_text(const Json& json) { return json.dump(2) + "\n"; }

std::string game_hash(const CongestionGame& game) {
  Json json = game_to_json(game);
  json.erase("meta");
  const std::string text = json.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return out.str();
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& err) {
    throw FormatError(path.string() + ": " + err.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("write failed for " + path.string());
}

LoadedGame read_game_file(const std::filesystem::path& path) { return load_game(game_from_json(read_json_file(path))); }

Json schedule_to_json(const ScheduleDocument& doc) {
  Json steps = Json::array();
  for (const ScriptStep& s : doc.script.steps) steps.push_back({s.player, s.strategy});
  return {{"coverings", doc.coverings}, {"initial", doc.initial.choices()}, {"meta", doc.meta}, {"steps", steps}};
}

ScheduleDocument schedule_from_json(const Json& json) {
  ScheduleDocument doc;
  doc.coverings = field<std::size_t>(json, "coverings", "schedule file");
  doc.initial = StrategyProfile(profile_from_json(json.value("initial", Json::array()), "schedule file initial"));
  const Json& steps = json.contains("steps") ? json.at("steps") : Json();
  if (!steps.is_array()) throw FormatError("schedule file: \"steps\" must be an array");
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const Json& s = steps[t];
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_unsigned() || !s[1].is_number_unsigned())
      throw FormatError("schedule file: step " + std::to_string(t) + " must be [player, strategy]");
    doc.script.steps.push_back({s[0].get<PlayerId>(), s[1].get<StrategyIndex>()});
  }
  if (json.contains("meta")) doc.meta = json.at("meta");
  return doc;
}

void write_trace_csv(std::ostream& out, const MoveTrace& trace) {
  out << kTraceHeader << '\n';
  for (const Move& m : trace.moves) {
    out << m.step << ',' << m.step / trace.covering_length << ',' << m.player << ',' << m.strategy << ',' << m.pre_cost
        << ',' << m.post_cost << ',' << to_string(m.flag) << ',' << m.social_cost << ',' << m.potential << '\n';
  }
}

std::string trace_csv(const MoveTrace& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

MoveTrace read_trace_csv(std::istream& in, const StrategyProfile& initial, std::size_t covering_length, Mode mode) {
  MoveTrace trace;
  trace.initial = initial;
  trace.covering_length = covering_length == 0 ? 1 : covering_length;
  trace.mode = mode;
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw FormatError("trace CSV: missing or unexpected header");
  StrategyProfile profile = initial;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    const std::string where = "trace CSV row " + std::to_string(row);
    if (cells.size() != 9) throw FormatError(where + ": expected 9 columns");
    try {
      Move m;
      m.step = std::stoull(cells[0]);
      m.player = std::stoull(cells[2]);
      m.strategy = static_cast<StrategyIndex>(std::stoul(cells[3]));
      m.pre_cost = std::stoll(cells[4]);
      m.post_cost = std::stoll(cells[5]);
      const auto flag = parse_move_flag(cells[6]);
      if (!flag) throw FormatError(where + ": unknown flag " + cells[6]);
      m.flag = *flag;
      m.social_cost = std::stoll(cells[7]);
      m.potential = std::stoll(cells[8]);
      if (m.step != trace.moves.size()) throw FormatError(where + ": steps must be consecutive from 0");
      if (std::stoull(cells[1]) != m.step / trace.covering_length) throw FormatError(where + ": covering column disagrees with T");
      if (m.player >= profile.size()) throw FormatError(where + ": unknown player");
      m.previous = profile[m.player];
      profile.set(m.player, m.strategy);
      trace.moves.push_back(m);
    } catch (const std::logic_error& err) {
      throw FormatError(where + ": " + err.what());
    }
  }
  return trace;
}

Json trace_meta_to_json(const TraceMeta& meta) {
  Json json = {{"coverings", meta.coverings},
               {"game_hash", meta.game_hash},
               {"initial", meta.initial.choices()},
               {"mode", to_string(meta.mode)},
               {"policy", meta.policy},
               {"spec", {{"T", meta.T}, {"beta", meta.beta}}},
               {"tie", meta.tie}};
  json["seed"] = meta.seed ? Json(*meta.seed) : Json(nullptr);
  return json;
}

TraceMeta trace_meta_from_json(const Json& json) {
  TraceMeta meta;
  const std::string where = "trace sidecar";
  meta.coverings = field<std::size_t>(json, "coverings", where);
  meta.game_hash = field<std::string>(json, "game_hash", where);
  meta.initial = StrategyProfile(profile_from_json(json.value("initial", Json::array()), where + " initial"));
  const auto mode = field<std::string>(json, "mode", where);
  if (mode == "strict") {
    meta.mode = Mode::Strict;
  } else if (mode == "permissive") {
    meta.mode = Mode::Permissive;
  } else {
    throw FormatError(where + ": unknown mode " + mode);
  }
  meta.policy = field<std::string>(json, "policy", where);
  if (!json.contains("spec")) throw FormatError(where + ": missing \"spec\"");
  meta.T = field<std::size_t>(json.at("spec"), "T", where + " spec");
  meta.beta = field<std::size_t>(json.at("spec"), "beta", where + " spec");
  meta.tie = json.value("tie", std::string("keep-current"));
  if (json.contains("seed") && !json.at("seed").is_null()) meta.seed = field<std::uint64_t>(json, "seed", where);
  return meta;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  return std::filesystem::path(csv.string() + ".meta.json");
}

std::pair<MoveTrace, TraceMeta> read_trace_files(const std::filesystem::path& csv) {
  TraceMeta meta = trace_meta_from_json(read_json_file(sidecar_path(csv)));
  std::ifstream in(csv);
  if (!in) throw FormatError("cannot open " + csv.string());
  MoveTrace trace = read_trace_csv(in, meta.initial, meta.T, meta.mode);
  return {std::move(trace), std::move(meta)};
}

}  // namespace cdl
