#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gamelab/errors.hpp"
#include "gamelab/gateway.hpp"

namespace gamelab {

enum class ScriptedPolicy {
  always_a,
  always_b,
  tit_for_tat,
  grim_trigger,
  random_uniform,
  alternator,
};

std::string to_string(ScriptedPolicy policy);
std::optional<ScriptedPolicy> scripted_policy_from_string(const std::string& name);
std::vector<std::string> scripted_policy_names();

// What a policy may look at: both agents' past strategy indices (oldest
// first) and the 1-based index of the round being decided.
struct HistoryView {
  std::vector<int> own;
  std::vector<int> opponent;
  int round = 1;
};

struct DecisionRequest {
  std::string prompt;  // rendered decision prompt, before the answer instruction
  std::vector<std::string> strategy_ids;
  std::vector<std::string> strategy_labels;  // localized, same order as ids
  HistoryView history;
  std::uint64_t seed = 0;  // drives stochastic scripted policies
  std::string agent_name;
  int retry_budget = 3;  // reprompts allowed after a malformed reply
};

struct Decision {
  int strategy_index = 0;
  std::string raw_reply;
  int attempts = 1;
};

enum class ParseOutcome { ok, no_match, ambiguous_match };

struct ParsedReply {
  ParseOutcome outcome = ParseOutcome::no_match;
  int strategy_index = -1;
};

// Matching cascade: exact trimmed reply equal to an id or label; failing
// that, case-insensitive substring hits on ids/labels must identify exactly
// one strategy. Ties are failures, never guesses.
ParsedReply parse_strategy_response(const std::string& reply,
                                    const std::vector<std::string>& strategy_ids,
                                    const std::vector<std::string>& strategy_labels);

class DecisionBackend {
 public:
  virtual ~DecisionBackend() = default;

  // Returns a choice among request.strategy_ids. Throws AgentFailure when
  // the backend cannot produce a valid choice within the retry budget.
  virtual Decision decide(const DecisionRequest& request) = 0;

  // Message phase (agents_communicate). Scripted backends stay silent.
  virtual std::string compose_message(const DecisionRequest& request);
};

class ScriptedBackend : public DecisionBackend {
 public:
  explicit ScriptedBackend(ScriptedPolicy policy) : policy_(policy) {}

  Decision decide(const DecisionRequest& request) override;
  ScriptedPolicy policy() const { return policy_; }

 private:
  ScriptedPolicy policy_;
};

// LLM-backed agent: submits the prompt with a fixed answer-format
// instruction, parses the reply, and reprompts on malformed answers.
class LlmBackend : public DecisionBackend {
 public:
  LlmBackend(std::shared_ptr<Gateway> gateway, ModelProfile profile);

  Decision decide(const DecisionRequest& request) override;
  std::string compose_message(const DecisionRequest& request) override;

 private:
  std::shared_ptr<Gateway> gateway_;
  ModelProfile profile_;
};

struct AgentHandle {
  std::string name;
  std::string personality_id;
  std::string language;
  std::shared_ptr<DecisionBackend> backend;
};

}  // namespace gamelab
