#include "gamelab/agents.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include "gamelab/hash.hpp"

namespace gamelab {

namespace {

std::string trim(const std::string& s) {
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

std::string ascii_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) out += ", ";
    out += labels[i];
  }
  return out;
}

}  // namespace

std::string to_string(ScriptedPolicy policy) {
  switch (policy) {
    case ScriptedPolicy::always_a: return "always_a";
    case ScriptedPolicy::always_b: return "always_b";
    case ScriptedPolicy::tit_for_tat: return "tit_for_tat";
    case ScriptedPolicy::grim_trigger: return "grim_trigger";
    case ScriptedPolicy::random_uniform: return "random_uniform";
    case ScriptedPolicy::alternator: return "alternator";
  }
  return "always_a";
}

std::optional<ScriptedPolicy> scripted_policy_from_string(const std::string& name) {
  if (name == "always_a") return ScriptedPolicy::always_a;
  if (name == "always_b") return ScriptedPolicy::always_b;
  if (name == "tit_for_tat") return ScriptedPolicy::tit_for_tat;
  if (name == "grim_trigger") return ScriptedPolicy::grim_trigger;
  if (name == "random_uniform") return ScriptedPolicy::random_uniform;
  if (name == "alternator") return ScriptedPolicy::alternator;
  return std::nullopt;
}

std::vector<std::string> scripted_policy_names() {
  return {"always_a",     "always_b",       "tit_for_tat",
          "grim_trigger", "random_uniform", "alternator"};
}

ParsedReply parse_strategy_response(const std::string& reply,
                                    const std::vector<std::string>& strategy_ids,
                                    const std::vector<std::string>& strategy_labels) {
  std::string trimmed = trim(reply);
  if (trimmed.empty()) return {ParseOutcome::no_match, -1};

  std::set<int> exact;
  for (size_t i = 0; i < strategy_ids.size(); ++i) {
    if (trimmed == strategy_ids[i] || trimmed == strategy_labels[i]) {
      exact.insert(static_cast<int>(i));
    }
  }
  if (exact.size() == 1) return {ParseOutcome::ok, *exact.begin()};
  if (exact.size() > 1) return {ParseOutcome::ambiguous_match, -1};

  std::string lowered = ascii_lower(trimmed);
  std::set<int> partial;
  for (size_t i = 0; i < strategy_ids.size(); ++i) {
    if (lowered.find(ascii_lower(strategy_ids[i])) != std::string::npos ||
        lowered.find(ascii_lower(strategy_labels[i])) != std::string::npos) {
      partial.insert(static_cast<int>(i));
    }
  }
  if (partial.size() == 1) return {ParseOutcome::ok, *partial.begin()};
  if (partial.size() > 1) return {ParseOutcome::ambiguous_match, -1};
  return {ParseOutcome::no_match, -1};
}

std::string DecisionBackend::compose_message(const DecisionRequest&) { return ""; }

Decision ScriptedBackend::decide(const DecisionRequest& request) {
  const int n = static_cast<int>(request.strategy_ids.size());
  if (n < 2) throw std::invalid_argument("decision request needs at least 2 strategies");
  const HistoryView& h = request.history;

  int choice = 0;
  switch (policy_) {
    case ScriptedPolicy::always_a:
      choice = 0;
      break;
    case ScriptedPolicy::always_b:
      choice = 1;
      break;
    case ScriptedPolicy::tit_for_tat:
      choice = h.opponent.empty() ? 1 : h.opponent.back();
      break;
    case ScriptedPolicy::grim_trigger: {
      bool betrayed = std::find(h.opponent.begin(), h.opponent.end(), 0) != h.opponent.end();
      choice = betrayed ? 0 : 1;
      break;
    }
    case ScriptedPolicy::random_uniform:
      choice = static_cast<int>(mix64(request.seed, static_cast<std::uint64_t>(h.round)) %
                                static_cast<std::uint64_t>(n));
      break;
    case ScriptedPolicy::alternator:
      choice = (h.round - 1) % n;
      break;
  }
  return {choice, request.strategy_ids[static_cast<size_t>(choice)], 1};
}

LlmBackend::LlmBackend(std::shared_ptr<Gateway> gateway, ModelProfile profile)
    : gateway_(std::move(gateway)), profile_(std::move(profile)) {}

Decision LlmBackend::decide(const DecisionRequest& request) {
  std::string instruction =
      "\n\nAnswer with exactly one of: " + join_labels(request.strategy_labels) + ".";
  std::string base = request.prompt + instruction;

  int attempts = 0;
  for (int attempt = 0; attempt <= request.retry_budget; ++attempt) {
    std::string prompt = base;
    if (attempt > 0) prompt += "\nYour previous answer was not a valid option.";
    CompletionResult result = gateway_->complete(profile_, CompletionRequest{prompt, std::nullopt});
    ++attempts;
    ParsedReply parsed =
        parse_strategy_response(result.text, request.strategy_ids, request.strategy_labels);
    if (parsed.outcome == ParseOutcome::ok) {
      return {parsed.strategy_index, result.text, attempts};
    }
  }
  throw AgentFailure(request.agent_name, "no valid strategy choice after " +
                                             std::to_string(attempts) + " attempts");
}

std::string LlmBackend::compose_message(const DecisionRequest& request) {
  std::string instruction =
      "\n\nWrite one short message (at most two sentences) to send to the other agent before "
      "this round's choices are made. Reply with the message text only.";
  std::string base = request.prompt + instruction;

  for (int attempt = 0; attempt <= request.retry_budget; ++attempt) {
    std::string prompt = base;
    if (attempt > 0) prompt += "\nYour previous reply was empty.";
    CompletionResult result = gateway_->complete(profile_, CompletionRequest{prompt, std::nullopt});
    std::string text = trim(result.text);
    if (!text.empty()) return text;
  }
  throw AgentFailure(request.agent_name, "no message text after " +
                                             std::to_string(request.retry_budget + 1) +
                                             " attempts");
}

}  // namespace gamelab
