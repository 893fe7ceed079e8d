#pragma once

#include <map>
#include <string>
#include <vector>

#include "gamelab/config.hpp"
#include "gamelab/errors.hpp"
#include "gamelab/validation.hpp"

namespace gamelab {

// Recognized placeholder names, brace syntax: {name}.
const std::vector<std::string>& recognized_placeholders();

// Placeholders every template must carry.
const std::vector<std::string>& required_placeholders();

struct PromptTemplate {
  std::string language;
  std::string body;
  std::vector<std::string> placeholders;  // names present in body, in order

  bool uses(const std::string& name) const;
};

class TemplateSet {
 public:
  void add(PromptTemplate tpl);
  const PromptTemplate* find(const std::string& language) const;
  const PromptTemplate& at(const std::string& language) const;
  std::vector<std::string> languages() const;
  size_t size() const { return templates_.size(); }

 private:
  std::map<std::string, PromptTemplate> templates_;
};

// Everything a template can mention about one agent's view of one round.
// history_text covers exactly rounds 1..current_round-1.
struct RoundContext {
  std::string game_name;
  int n_rounds = 0;
  int current_round = 1;
  bool n_rounds_is_known = true;
  std::string personality_text;           // empty -> sentence omitted
  std::string opponent_personality_text;  // empty -> sentence omitted
  std::vector<std::string> strategies;    // localized labels, declaration order
  std::string payoff_description;
  std::string history_text;
  std::string incoming_message;
};

// Parses one template source per language. Scans placeholders; throws
// TemplateError for an unrecognized placeholder (with its byte offset) or a
// missing required one. When expected_languages is nonempty, every listed
// language must have a source.
TemplateSet load_templates(const std::map<std::string, std::string>& sources,
                           const std::vector<std::string>& expected_languages = {});

// Cross-checks a template set against a config: full language coverage and
// placeholder satisfiability ({personality} needs a non-"none" personality,
// {opponent_personality} additionally a positive disclosure probability,
// {incoming_message} needs agentsCommunicate).
ValidationReport validate_templates(const TemplateSet& templates, const GameConfig& config);

// Pure substitution. The round-count sentence states the total only when it
// is known; empty context values render as empty text. Throws TemplateError
// if the body mentions a placeholder outside the recognized set.
std::string render_prompt(const PromptTemplate& tpl, const RoundContext& ctx);

}  // namespace gamelab
