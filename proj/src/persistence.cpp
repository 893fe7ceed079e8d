#include "gamelab/persistence.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gamelab/hash.hpp"

namespace gamelab {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json must_parse(const std::string& text, const char* what) {
  ordered_json parsed = ordered_json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    throw std::runtime_error(std::string(what) + " is not valid JSON");
  }
  return parsed;
}

}  // namespace

std::string digest_hex(const std::string& bytes) { return hex64(fnv1a64(bytes)); }

std::string history_to_json_line(const GameHistory& history) {
  const GameDescriptor& game = history.game;
  ordered_json setup;
  setup["key"] = game.setup_key;
  setup["game"] = game.game_name;
  setup["llm"] = game.llm;
  setup["language"] = game.language;
  setup["variant"] = game.variant_id;
  setup["repetition"] = game.repetition;
  setup["nRounds"] = game.n_rounds;
  setup["roundsKnown"] = game.rounds_known;
  setup["agentsCommunicate"] = game.agents_communicate;
  setup["orientation"] = to_string(game.matrix.orientation);
  setup["strategies"] = game.matrix.strategy_ids;
  setup["labels"] = game.strategy_labels;
  setup["stopGameWhen"] = game.stop_game_when;

  ordered_json agents = ordered_json::array();
  for (const AgentInfo& agent : game.agents) {
    ordered_json entry;
    entry["name"] = agent.name;
    entry["personality"] = agent.personality_id;
    entry["opponentProb"] = agent.disclosure_prob;
    agents.push_back(std::move(entry));
  }
  setup["agents"] = std::move(agents);

  ordered_json matrix;
  for (const auto& [combination, scores] : game.matrix.table) {
    matrix[combination] = scores;
  }
  setup["matrix"] = std::move(matrix);

  ordered_json rounds = ordered_json::array();
  for (const RoundRecord& record : history.records) {
    ordered_json row;
    row["round"] = record.round;
    ordered_json moves = ordered_json::array();
    for (int index : record.strategies) {
      moves.push_back(game.matrix.strategy_ids.at(static_cast<size_t>(index)));
    }
    row["moves"] = std::move(moves);
    row["scores"] = record.scores;
    if (!record.messages.empty()) row["messages"] = record.messages;
    if (!record.raw_replies.empty()) {
      ordered_json digests = ordered_json::array();
      for (const std::string& reply : record.raw_replies) digests.push_back(digest_hex(reply));
      row["replyDigests"] = std::move(digests);
    } else if (!record.reply_digests.empty()) {
      row["replyDigests"] = record.reply_digests;
    }
    rounds.push_back(std::move(row));
  }

  ordered_json line;
  line["setup"] = std::move(setup);
  line["rounds"] = std::move(rounds);
  line["termination"] = to_string(history.termination);
  if (history.failure) {
    ordered_json failure;
    failure["agent"] = history.failure->agent_name;
    failure["message"] = history.failure->message;
    line["failure"] = std::move(failure);
  }
  return line.dump();
}

GameHistory history_from_json_line(const std::string& line) {
  ordered_json parsed = must_parse(line, "history line");

  GameHistory history;
  const ordered_json& setup = parsed.at("setup");
  GameDescriptor& game = history.game;
  game.setup_key = setup.at("key").get<std::string>();
  game.game_name = setup.at("game").get<std::string>();
  game.llm = setup.at("llm").get<std::string>();
  game.language = setup.at("language").get<std::string>();
  game.variant_id = setup.at("variant").get<std::string>();
  game.repetition = setup.at("repetition").get<int>();
  game.n_rounds = setup.at("nRounds").get<int>();
  game.rounds_known = setup.at("roundsKnown").get<bool>();
  game.agents_communicate = setup.at("agentsCommunicate").get<bool>();
  game.stop_game_when = setup.at("stopGameWhen").get<std::vector<std::string>>();
  game.strategy_labels = setup.at("labels").get<std::vector<std::string>>();

  game.matrix.strategy_ids = setup.at("strategies").get<std::vector<std::string>>();
  game.matrix.orientation = setup.at("orientation").get<std::string>() == "reward"
                                ? Orientation::reward
                                : Orientation::penalty;
  for (const auto& [combination, scores] : setup.at("matrix").items()) {
    game.matrix.table.set(combination, scores.get<std::vector<double>>());
  }

  for (const ordered_json& entry : setup.at("agents")) {
    AgentInfo agent;
    agent.name = entry.at("name").get<std::string>();
    agent.personality_id = entry.at("personality").get<std::string>();
    agent.disclosure_prob = entry.at("opponentProb").get<double>();
    game.agents.push_back(std::move(agent));
  }

  auto index_of = [&](const std::string& id) {
    for (size_t i = 0; i < game.matrix.strategy_ids.size(); ++i) {
      if (game.matrix.strategy_ids[i] == id) return static_cast<int>(i);
    }
    throw std::runtime_error("history line references unknown strategy \"" + id + "\"");
  };

  for (const ordered_json& row : parsed.at("rounds")) {
    RoundRecord record;
    record.round = row.at("round").get<int>();
    for (const ordered_json& move : row.at("moves")) {
      record.strategies.push_back(index_of(move.get<std::string>()));
    }
    record.scores = row.at("scores").get<std::vector<double>>();
    if (row.contains("messages")) {
      record.messages = row.at("messages").get<std::vector<std::string>>();
    }
    if (row.contains("replyDigests")) {
      record.reply_digests = row.at("replyDigests").get<std::vector<std::string>>();
    }
    history.records.push_back(std::move(record));
  }

  history.termination = termination_from_string(parsed.at("termination").get<std::string>());
  if (parsed.contains("failure")) {
    AgentFailureInfo failure;
    failure.agent_name = parsed.at("failure").at("agent").get<std::string>();
    failure.message = parsed.at("failure").at("message").get<std::string>();
    history.failure = std::move(failure);
  }
  return history;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

bool file_exists(const std::string& path) { return std::filesystem::exists(path); }

std::vector<std::string> read_complete_lines(const std::string& path) {
  if (!file_exists(path)) return {};
  std::string content = read_file(path);
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < content.size()) {
    size_t end = content.find('\n', start);
    if (end == std::string::npos) break;  // torn tail, no terminating newline
    if (end > start) lines.push_back(content.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

bool truncate_partial_last_line(const std::string& path) {
  std::string content = read_file(path);
  size_t last_newline = content.rfind('\n');
  size_t keep = last_newline == std::string::npos ? 0 : last_newline + 1;
  if (keep == content.size()) return false;
  write_file(path, content.substr(0, keep));
  return true;
}

std::vector<GameHistory> load_histories(const std::string& path) {
  std::vector<GameHistory> out;
  for (const std::string& line : read_complete_lines(path)) {
    out.push_back(history_from_json_line(line));
  }
  return out;
}

std::string manifest_to_json(const RunManifest& manifest) {
  ordered_json doc;
  doc["tool"] = manifest.tool;
  doc["configDigest"] = manifest.config_digest;
  ordered_json templates;
  for (const auto& [language, digest] : manifest.template_digests) {
    templates[language] = digest;
  }
  doc["templateDigests"] = std::move(templates);
  doc["profilesDigest"] = manifest.profiles_digest;
  doc["variants"] = manifest.variants;
  doc["repetitions"] = manifest.repetitions;
  doc["seed"] = manifest.seed;
  doc["dedupeMixedPersonalities"] = manifest.dedupe_mixed;
  doc["concurrency"] = manifest.concurrency;
  doc["startedAt"] = manifest.started_at;
  doc["finishedAt"] = manifest.finished_at;
  ordered_json counts;
  counts["games"] = manifest.games;
  counts["decisions"] = manifest.decisions;
  counts["failures"] = manifest.failures;
  doc["counts"] = std::move(counts);
  return doc.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  ordered_json doc = must_parse(text, "manifest");
  RunManifest manifest;
  manifest.tool = doc.at("tool").get<std::string>();
  manifest.config_digest = doc.at("configDigest").get<std::string>();
  for (const auto& [language, digest] : doc.at("templateDigests").items()) {
    manifest.template_digests[language] = digest.get<std::string>();
  }
  manifest.profiles_digest = doc.at("profilesDigest").get<std::string>();
  manifest.variants = doc.at("variants").get<std::vector<std::string>>();
  manifest.repetitions = doc.at("repetitions").get<int>();
  manifest.seed = doc.at("seed").get<std::uint64_t>();
  manifest.dedupe_mixed = doc.at("dedupeMixedPersonalities").get<bool>();
  manifest.concurrency = doc.at("concurrency").get<int>();
  manifest.started_at = doc.at("startedAt").get<std::string>();
  manifest.finished_at = doc.at("finishedAt").get<std::string>();
  manifest.games = doc.at("counts").at("games").get<size_t>();
  manifest.decisions = doc.at("counts").at("decisions").get<size_t>();
  manifest.failures = doc.at("counts").at("failures").get<size_t>();
  return manifest;
}

std::string iso8601_utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace gamelab
