#include "gamelab/prompt.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace gamelab {

const std::vector<std::string>& recognized_placeholders() {
  static const std::vector<std::string> names = {
      "game_name",   "n_rounds",  "current_round",       "round_info",
      "personality", "opponent_personality", "strategies", "payoff_description",
      "history",     "incoming_message"};
  return names;
}

const std::vector<std::string>& required_placeholders() {
  static const std::vector<std::string> names = {"strategies", "payoff_description",
                                                 "round_info"};
  return names;
}

bool PromptTemplate::uses(const std::string& name) const {
  return std::find(placeholders.begin(), placeholders.end(), name) != placeholders.end();
}

void TemplateSet::add(PromptTemplate tpl) { templates_[tpl.language] = std::move(tpl); }

const PromptTemplate* TemplateSet::find(const std::string& language) const {
  auto it = templates_.find(language);
  return it == templates_.end() ? nullptr : &it->second;
}

const PromptTemplate& TemplateSet::at(const std::string& language) const {
  if (const auto* tpl = find(language)) return *tpl;
  throw TemplateError(TemplateError::Kind::missing_language,
                      "no template for language '" + language + "'");
}

std::vector<std::string> TemplateSet::languages() const {
  std::vector<std::string> out;
  for (const auto& [lang, tpl] : templates_) out.push_back(lang);
  return out;
}

namespace {

bool recognized(const std::string& name) {
  const auto& names = recognized_placeholders();
  return std::find(names.begin(), names.end(), name) != names.end();
}

// Scans {name} occurrences. Returns names in order of first appearance;
// throws on a brace pair whose content is not a recognized placeholder.
std::vector<std::string> scan_placeholders(const std::string& body) {
  std::vector<std::string> found;
  size_t pos = 0;
  while ((pos = body.find('{', pos)) != std::string::npos) {
    size_t end = body.find('}', pos + 1);
    if (end == std::string::npos) break;  // stray brace, treated as literal
    std::string name = body.substr(pos + 1, end - pos - 1);
    if (!recognized(name))
      throw TemplateError(TemplateError::Kind::unknown_placeholder,
                          "unknown placeholder '{" + name + "}' at offset " +
                              std::to_string(pos),
                          pos);
    if (std::find(found.begin(), found.end(), name) == found.end()) found.push_back(name);
    pos = end + 1;
  }
  return found;
}

}  // namespace

TemplateSet load_templates(const std::map<std::string, std::string>& sources,
                           const std::vector<std::string>& expected_languages) {
  for (const auto& lang : expected_languages)
    if (!sources.count(lang))
      throw TemplateError(TemplateError::Kind::missing_language,
                          "no template source for language '" + lang + "'");

  TemplateSet out;
  for (const auto& [lang, body] : sources) {
    PromptTemplate tpl{lang, body, scan_placeholders(body)};
    for (const auto& name : required_placeholders())
      if (!tpl.uses(name))
        throw TemplateError(TemplateError::Kind::missing_placeholder,
                            "template '" + lang + "' lacks required placeholder {" + name + "}");
    out.add(std::move(tpl));
  }
  return out;
}

ValidationReport validate_templates(const TemplateSet& templates, const GameConfig& config) {
  ValidationReport report;

  bool any_real_personality = false;
  for (const auto& pid : config.personality_ids())
    if (pid != "none") any_real_personality = true;
  bool any_disclosure = false;
  for (double q : config.agents.opponent_personality_prob)
    if (q > 0.0) any_disclosure = true;

  for (const auto& lang : config.languages) {
    const auto* tpl = templates.find(lang);
    if (!tpl) {
      report.add("MISSING_TEMPLATE", "templates." + lang,
                 "config language '" + lang + "' has no template");
      continue;
    }
    if (tpl->uses("personality") && !any_real_personality)
      report.add("UNSATISFIABLE_PLACEHOLDER", "templates." + lang + ".personality",
                 "{personality} used but every personality id is 'none'");
    if (tpl->uses("opponent_personality") && !(any_real_personality && any_disclosure))
      report.add("UNSATISFIABLE_PLACEHOLDER", "templates." + lang + ".opponent_personality",
                 "{opponent_personality} used but no personality can be disclosed");
    if (tpl->uses("incoming_message") && !config.agents_communicate)
      report.add("UNSATISFIABLE_PLACEHOLDER", "templates." + lang + ".incoming_message",
                 "{incoming_message} used but agentsCommunicate is false");
  }
  return report;
}

std::string render_prompt(const PromptTemplate& tpl, const RoundContext& ctx) {
  auto value_of = [&](const std::string& name) -> std::string {
    if (name == "game_name") return ctx.game_name;
    if (name == "n_rounds")
      return ctx.n_rounds_is_known ? std::to_string(ctx.n_rounds) : std::string("unknown");
    if (name == "current_round") return std::to_string(ctx.current_round);
    if (name == "round_info") {
      std::ostringstream os;
      os << "This is round " << ctx.current_round;
      if (ctx.n_rounds_is_known)
        os << " of " << ctx.n_rounds << ".";
      else
        os << ". The total number of rounds is not known in advance.";
      return os.str();
    }
    if (name == "personality") return ctx.personality_text;
    if (name == "opponent_personality") return ctx.opponent_personality_text;
    if (name == "strategies") {
      std::string out;
      for (const auto& label : ctx.strategies) {
        if (!out.empty()) out += ", ";
        out += label;
      }
      return out;
    }
    if (name == "payoff_description") return ctx.payoff_description;
    if (name == "history") return ctx.history_text;
    if (name == "incoming_message") return ctx.incoming_message;
    throw TemplateError(TemplateError::Kind::unknown_placeholder,
                        "no context value for placeholder '{" + name + "}'");
  };

  std::string out;
  out.reserve(tpl.body.size());
  size_t pos = 0;
  while (pos < tpl.body.size()) {
    size_t open = tpl.body.find('{', pos);
    if (open == std::string::npos) {
      out.append(tpl.body, pos, std::string::npos);
      break;
    }
    size_t close = tpl.body.find('}', open + 1);
    if (close == std::string::npos) {
      out.append(tpl.body, pos, std::string::npos);
      break;
    }
    out.append(tpl.body, pos, open - pos);
    out += value_of(tpl.body.substr(open + 1, close - open - 1));
    pos = close + 1;
  }
  return out;
}

}  // namespace gamelab
