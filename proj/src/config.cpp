#include "gamelab/config.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gamelab {

using ordered_json = nlohmann::ordered_json;

std::string to_string(Orientation o) {
  return o == Orientation::penalty ? "penalty" : "reward";
}

std::vector<std::string> GameConfig::personality_ids() const {
  if (languages.empty() || agents.personalities.empty()) return {};
  if (const auto* first = agents.personalities.find(languages.front())) return first->keys();
  return agents.personalities.begin()->second.keys();
}

std::vector<std::string> GameConfig::strategy_ids() const {
  if (languages.empty() || payoff_matrix.strategies.empty()) return {};
  if (const auto* first = payoff_matrix.strategies.find(languages.front())) return first->keys();
  return payoff_matrix.strategies.begin()->second.keys();
}

std::string AgentAssignment::combo_key() const {
  std::string out;
  for (const auto& slot : slots) {
    if (!out.empty()) out += '+';
    out += slot.personality_id;
  }
  return out;
}

std::string GameSetup::key() const {
  std::string out;
  for (const auto& slot : assignment.slots) {
    if (!out.empty()) out += ',';
    out += slot.name + '=' + slot.personality_id;
  }
  return out + '|' + language + '|' + variant_id + '|' + std::to_string(repetition);
}

namespace {

[[noreturn]] void missing(const std::string& path) {
  throw ConfigError(ConfigError::Kind::missing_field, path, "required field is missing");
}

[[noreturn]] void mismatch(const std::string& path, const char* expected) {
  throw ConfigError(ConfigError::Kind::type_mismatch, path,
                    std::string("expected ") + expected);
}

const ordered_json& member(const ordered_json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) mismatch(path, "object");
  auto it = obj.find(key);
  if (it == obj.end()) missing(path.empty() ? key : path + "." + key);
  return *it;
}

std::string as_string(const ordered_json& j, const std::string& path) {
  if (!j.is_string()) mismatch(path, "string");
  return j.get<std::string>();
}

bool as_bool(const ordered_json& j, const std::string& path) {
  if (!j.is_boolean()) mismatch(path, "boolean");
  return j.get<bool>();
}

double as_number(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) mismatch(path, "number");
  return j.get<double>();
}

std::vector<std::string> as_string_list(const ordered_json& j, const std::string& path) {
  if (!j.is_array()) mismatch(path, "array of strings");
  std::vector<std::string> out;
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(as_string(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

OrderedDict<std::string> as_string_dict(const ordered_json& j, const std::string& path) {
  if (!j.is_object()) mismatch(path, "object");
  OrderedDict<std::string> out;
  for (const auto& [key, value] : j.items())
    out.set(key, as_string(value, path + "." + key));
  return out;
}

}  // namespace

GameConfig parse_config(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::syntax, "",
                      "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) mismatch("", "object");

  GameConfig cfg;
  cfg.name = as_string(member(doc, "", "name"), "name");

  const auto& rounds = member(doc, "", "nRounds");
  if (!rounds.is_number_integer()) mismatch("nRounds", "integer");
  cfg.n_rounds = rounds.get<int>();
  if (cfg.n_rounds < 1)
    throw ConfigError(ConfigError::Kind::invariant, "nRounds", "n_rounds >= 1 violated");

  cfg.n_rounds_is_known = as_bool(member(doc, "", "nRoundsIsKnown"), "nRoundsIsKnown");
  cfg.llm = as_string(member(doc, "", "llm"), "llm");
  cfg.languages = as_string_list(member(doc, "", "languages"), "languages");
  cfg.all_agent_permutations =
      as_bool(member(doc, "", "allAgentPermutations"), "allAgentPermutations");

  const auto& agents = member(doc, "", "agents");
  cfg.agents.names = as_string_list(member(agents, "agents", "names"), "agents.names");
  const auto& pers = member(agents, "agents", "personalities");
  if (!pers.is_object()) mismatch("agents.personalities", "object");
  for (const auto& [lang, table] : pers.items())
    cfg.agents.personalities.set(lang, as_string_dict(table, "agents.personalities." + lang));
  const auto& probs = member(agents, "agents", "opponentPersonalityProb");
  if (!probs.is_array()) mismatch("agents.opponentPersonalityProb", "array of numbers");
  for (size_t i = 0; i < probs.size(); ++i)
    cfg.agents.opponent_personality_prob.push_back(
        as_number(probs[i], "agents.opponentPersonalityProb[" + std::to_string(i) + "]"));

  const auto& pm = member(doc, "", "payoffMatrix");
  const auto& weights = member(pm, "payoffMatrix", "weights");
  if (!weights.is_object()) mismatch("payoffMatrix.weights", "object");
  for (const auto& [wid, value] : weights.items())
    cfg.payoff_matrix.weights.set(wid, as_number(value, "payoffMatrix.weights." + wid));
  const auto& strategies = member(pm, "payoffMatrix", "strategies");
  if (!strategies.is_object()) mismatch("payoffMatrix.strategies", "object");
  for (const auto& [lang, table] : strategies.items())
    cfg.payoff_matrix.strategies.set(lang,
                                     as_string_dict(table, "payoffMatrix.strategies." + lang));
  cfg.payoff_matrix.combinations =
      as_string_list(member(pm, "payoffMatrix", "combinations"), "payoffMatrix.combinations");
  const auto& matrix = member(pm, "payoffMatrix", "matrix");
  if (!matrix.is_object()) mismatch("payoffMatrix.matrix", "object");
  for (const auto& [combo, tuple] : matrix.items())
    cfg.payoff_matrix.matrix.set(combo,
                                 as_string_list(tuple, "payoffMatrix.matrix." + combo));

  cfg.stop_game_when = as_string_list(member(doc, "", "stopGameWhen"), "stopGameWhen");

  if (auto it = doc.find("agentsCommunicate"); it != doc.end())
    cfg.agents_communicate = as_bool(*it, "agentsCommunicate");
  if (auto it = doc.find("orientation"); it != doc.end()) {
    std::string o = as_string(*it, "orientation");
    if (o == "penalty")
      cfg.payoff_matrix.orientation = Orientation::penalty;
    else if (o == "reward")
      cfg.payoff_matrix.orientation = Orientation::reward;
    else
      mismatch("orientation", "\"penalty\" or \"reward\"");
  }
  if (auto it = doc.find("variantId"); it != doc.end())
    cfg.variant_id = as_string(*it, "variantId");

  return cfg;
}

std::string serialize_config(const GameConfig& cfg) {
  ordered_json doc;
  doc["name"] = cfg.name;
  doc["nRounds"] = cfg.n_rounds;
  doc["nRoundsIsKnown"] = cfg.n_rounds_is_known;
  doc["llm"] = cfg.llm;
  doc["languages"] = cfg.languages;
  doc["allAgentPermutations"] = cfg.all_agent_permutations;

  ordered_json agents;
  agents["names"] = cfg.agents.names;
  ordered_json pers = ordered_json::object();
  for (const auto& [lang, table] : cfg.agents.personalities) {
    ordered_json t = ordered_json::object();
    for (const auto& [pid, text] : table) t[pid] = text;
    pers[lang] = std::move(t);
  }
  agents["personalities"] = std::move(pers);
  agents["opponentPersonalityProb"] = cfg.agents.opponent_personality_prob;
  doc["agents"] = std::move(agents);

  ordered_json pm;
  ordered_json weights = ordered_json::object();
  for (const auto& [wid, value] : cfg.payoff_matrix.weights) weights[wid] = value;
  pm["weights"] = std::move(weights);
  ordered_json strategies = ordered_json::object();
  for (const auto& [lang, table] : cfg.payoff_matrix.strategies) {
    ordered_json t = ordered_json::object();
    for (const auto& [sid, label] : table) t[sid] = label;
    strategies[lang] = std::move(t);
  }
  pm["strategies"] = std::move(strategies);
  pm["combinations"] = cfg.payoff_matrix.combinations;
  ordered_json matrix = ordered_json::object();
  for (const auto& [combo, tuple] : cfg.payoff_matrix.matrix) matrix[combo] = tuple;
  pm["matrix"] = std::move(matrix);
  doc["payoffMatrix"] = std::move(pm);

  doc["stopGameWhen"] = cfg.stop_game_when;
  doc["agentsCommunicate"] = cfg.agents_communicate;
  doc["orientation"] = to_string(cfg.payoff_matrix.orientation);
  doc["variantId"] = cfg.variant_id;
  return doc.dump(2);
}

namespace {

template <class T>
std::vector<std::string> duplicates(const std::vector<T>& values) {
  std::vector<std::string> out;
  std::set<T> seen;
  for (const auto& v : values)
    if (!seen.insert(v).second) out.push_back(v);
  return out;
}

// All combination labels of the full Cartesian product, player-major order.
std::vector<std::string> product_labels(const std::vector<std::string>& ids, size_t players) {
  std::vector<std::string> out{""};
  for (size_t p = 0; p < players; ++p) {
    std::vector<std::string> next;
    next.reserve(out.size() * ids.size());
    for (const auto& prefix : out)
      for (const auto& id : ids) next.push_back(prefix + id);
    out = std::move(next);
  }
  return out;
}

}  // namespace

ValidationReport validate_config(const GameConfig& cfg) {
  ValidationReport report;

  if (cfg.n_rounds < 1)
    report.add("N_ROUNDS_NOT_POSITIVE", "nRounds", "n_rounds >= 1 violated");

  if (cfg.languages.empty())
    report.add("EMPTY_LANGUAGES", "languages", "at least one language is required");
  for (const auto& dup : duplicates(cfg.languages))
    report.add("DUPLICATE_LANGUAGE", "languages", "language '" + dup + "' listed twice");

  const size_t players = cfg.agents.names.size();
  if (players < 2)
    report.add("TOO_FEW_AGENTS", "agents.names", "at least two agents are required");
  for (const auto& dup : duplicates(cfg.agents.names))
    report.add("DUPLICATE_AGENT_NAME", "agents.names", "agent '" + dup + "' listed twice");

  // Personalities: every configured language covered, identical id sets.
  std::vector<std::string> canonical_pids;
  for (const auto& lang : cfg.languages) {
    const auto* table = cfg.agents.personalities.find(lang);
    if (!table) {
      report.add("MISSING_LANGUAGE_PERSONALITIES", "agents.personalities",
                 "no personalities for language '" + lang + "'");
      continue;
    }
    if (canonical_pids.empty()) {
      canonical_pids = table->keys();
    } else {
      auto a = canonical_pids, b = table->keys();
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b)
        report.add("PERSONALITY_SET_MISMATCH", "agents.personalities." + lang,
                   "personality ids differ from language '" + cfg.languages.front() + "'");
    }
  }

  if (cfg.agents.opponent_personality_prob.size() != players)
    report.add("PROB_COUNT_MISMATCH", "agents.opponentPersonalityProb",
               "expected one probability per agent (" + std::to_string(players) + ")");
  for (size_t i = 0; i < cfg.agents.opponent_personality_prob.size(); ++i) {
    double q = cfg.agents.opponent_personality_prob[i];
    if (q < 0.0 || q > 1.0)
      report.add("PROB_OUT_OF_RANGE",
                 "agents.opponentPersonalityProb[" + std::to_string(i) + "]",
                 "probability must lie in [0,1]");
  }

  // Strategies: language coverage and identical id sets.
  std::vector<std::string> canonical_sids;
  for (const auto& lang : cfg.languages) {
    const auto* table = cfg.payoff_matrix.strategies.find(lang);
    if (!table) {
      report.add("MISSING_LANGUAGE_STRATEGIES", "payoffMatrix.strategies",
                 "no strategy labels for language '" + lang + "'");
      continue;
    }
    if (canonical_sids.empty()) {
      canonical_sids = table->keys();
    } else {
      auto a = canonical_sids, b = table->keys();
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b)
        report.add("STRATEGY_SET_MISMATCH", "payoffMatrix.strategies." + lang,
                   "strategy ids differ from language '" + cfg.languages.front() + "'");
    }
  }

  // Combinations must be exactly the Cartesian product of strategy ids.
  if (!canonical_sids.empty() && players >= 2) {
    const auto expected = product_labels(canonical_sids, players);
    std::set<std::string> expected_set(expected.begin(), expected.end());
    std::set<std::string> listed(cfg.payoff_matrix.combinations.begin(),
                                 cfg.payoff_matrix.combinations.end());
    for (const auto& dup : duplicates(cfg.payoff_matrix.combinations))
      report.add("DUPLICATE_COMBINATION", "payoffMatrix.combinations",
                 "combination '" + dup + "' listed twice");
    for (const auto& combo : expected)
      if (!listed.count(combo))
        report.add("MISSING_COMBINATION", "payoffMatrix.combinations",
                   "product combination '" + combo + "' is not listed");
    for (const auto& combo : cfg.payoff_matrix.combinations)
      if (!expected_set.count(combo))
        report.add("UNEXPECTED_COMBINATION", "payoffMatrix.combinations",
                   "combination '" + combo + "' is not in the strategy product");

    for (const auto& combo : cfg.payoff_matrix.combinations) {
      const auto* tuple = cfg.payoff_matrix.matrix.find(combo);
      if (!tuple) {
        report.add("MATRIX_MISSING_COMBINATION", "payoffMatrix.matrix",
                   "no payoff tuple for combination '" + combo + "'");
        continue;
      }
      if (tuple->size() != players)
        report.add("MATRIX_ARITY_MISMATCH", "payoffMatrix.matrix." + combo,
                   "expected " + std::to_string(players) + " weight ids");
      for (size_t i = 0; i < tuple->size(); ++i)
        if (!cfg.payoff_matrix.weights.contains((*tuple)[i]))
          report.add("UNKNOWN_WEIGHT",
                     "payoffMatrix.matrix." + combo + "[" + std::to_string(i) + "]",
                     "weight id '" + (*tuple)[i] + "' is not defined");
    }
    for (const auto& [combo, tuple] : cfg.payoff_matrix.matrix)
      if (!listed.count(combo))
        report.add("MATRIX_UNKNOWN_COMBINATION", "payoffMatrix.matrix." + combo,
                   "matrix entry is not a listed combination");
  }

  std::set<std::string> combos(cfg.payoff_matrix.combinations.begin(),
                               cfg.payoff_matrix.combinations.end());
  for (size_t i = 0; i < cfg.stop_game_when.size(); ++i)
    if (!combos.count(cfg.stop_game_when[i]))
      report.add("UNKNOWN_COMBINATION", "stopGameWhen[" + std::to_string(i) + "]",
                 "label '" + cfg.stop_game_when[i] + "' is not a combination");

  return report;
}

std::vector<AgentAssignment> expand_agent_permutations(const GameConfig& cfg,
                                                       bool dedupe_mixed) {
  const auto& names = cfg.agents.names;
  const auto pids = cfg.personality_ids();
  auto disclose = [&](size_t i) {
    return i < cfg.agents.opponent_personality_prob.size() &&
           cfg.agents.opponent_personality_prob[i] > 0.0;
  };

  std::vector<AgentAssignment> out;
  if (!cfg.all_agent_permutations || pids.empty()) {
    // Literal assignment: agent i takes the i-th declared personality id.
    AgentAssignment a;
    for (size_t i = 0; i < names.size(); ++i) {
      std::string pid = pids.empty() ? std::string("none") : pids[i % pids.size()];
      a.slots.push_back({names[i], pid, disclose(i)});
    }
    out.push_back(std::move(a));
    return out;
  }

  // Odometer over personality ids, first agent most significant.
  std::vector<size_t> idx(names.size(), 0);
  std::set<std::vector<std::string>> seen;
  while (true) {
    std::vector<std::string> combo;
    combo.reserve(names.size());
    for (size_t i = 0; i < names.size(); ++i) combo.push_back(pids[idx[i]]);

    bool keep = true;
    if (dedupe_mixed) {
      auto canonical = combo;
      std::sort(canonical.begin(), canonical.end());
      keep = seen.insert(canonical).second;
      if (keep) combo = std::move(canonical);
    }
    if (keep) {
      AgentAssignment a;
      for (size_t i = 0; i < names.size(); ++i)
        a.slots.push_back({names[i], combo[i], disclose(i)});
      out.push_back(std::move(a));
    }

    size_t pos = idx.size();
    while (pos > 0) {
      --pos;
      if (++idx[pos] < pids.size()) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
  }
}

std::vector<GameSetup> enumerate_game_setups(const GameConfig& cfg,
                                             const std::vector<std::string>& variants,
                                             int repetitions,
                                             bool dedupe_mixed) {
  if (variants.empty()) throw std::invalid_argument("enumerate_game_setups: no variants given");
  if (repetitions < 1)
    throw std::invalid_argument("enumerate_game_setups: repetitions must be >= 1");

  std::vector<GameSetup> out;
  for (const auto& assignment : expand_agent_permutations(cfg, dedupe_mixed))
    for (const auto& language : cfg.languages)
      for (const auto& variant : variants)
        for (int rep = 0; rep < repetitions; ++rep)
          out.push_back({assignment, language, variant, rep});
  return out;
}

}  // namespace gamelab
