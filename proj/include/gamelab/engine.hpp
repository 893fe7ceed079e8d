#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gamelab/agents.hpp"
#include "gamelab/config.hpp"
#include "gamelab/payoff.hpp"
#include "gamelab/prompt.hpp"

namespace gamelab {

enum class Termination { completed_all_rounds, stop_condition, agent_failure };

std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

// Variant ids name a payoff matrix plus an optional rounds-knowledge
// override: "<base>[+known|+unknown]". The base is a built-in preset id or
// "config" (the config's own matrix).
struct VariantSpec {
  std::string base;
  std::optional<bool> rounds_known;
};

VariantSpec parse_variant(const std::string& variant_id);
std::string base_variant(const std::string& variant_id);

struct AgentInfo {
  std::string name;
  std::string personality_id;
  double disclosure_prob = 0.0;  // chance opponents are told this personality
};

// Immutable identity and rules of one game; everything persistence needs to
// make the history line self-contained.
struct GameDescriptor {
  std::string game_name;
  std::string llm;
  std::string language;
  std::string variant_id;  // as enumerated, suffix included
  std::string setup_key;
  int repetition = 0;
  int n_rounds = 1;
  bool rounds_known = true;
  bool agents_communicate = false;
  std::vector<std::string> stop_game_when;
  PayoffMatrix matrix;
  std::vector<std::string> strategy_labels;  // localized, canonical id order
  std::vector<AgentInfo> agents;
};

struct RoundRecord {
  int round = 1;  // 1-based
  std::vector<int> strategies;          // per-agent index into matrix.strategy_ids
  std::vector<double> scores;           // per-agent payoff of this round
  std::vector<std::string> messages;    // per-agent; empty unless agents_communicate
  std::vector<std::string> raw_replies; // what each backend answered verbatim
  std::vector<std::string> reply_digests;  // filled when loaded back from disk
};

struct AgentFailureInfo {
  std::string agent_name;
  std::string message;
};

struct GameHistory {
  GameDescriptor game;
  std::vector<RoundRecord> records;
  Termination termination = Termination::completed_all_rounds;
  std::optional<AgentFailureInfo> failure;
};

// Per-agent cumulative scores over the recorded rounds.
std::vector<double> final_scores(const GameHistory& history);

// True iff the latest record's combination label is in stop_game_when.
bool check_stop_condition(const GameHistory& history,
                          const std::vector<std::string>& stop_game_when);

// An agent bound into one game: handle plus its localized personality text.
struct BoundAgent {
  AgentHandle handle;
  std::string personality_text;  // empty when the personality id is "none"
};

class GameInstance {
 public:
  GameInstance(GameDescriptor descriptor, std::vector<BoundAgent> agents,
               PromptTemplate tpl, std::uint64_t seed, int retry_budget = 3);

  const GameDescriptor& descriptor() const { return history_.game; }
  const GameHistory& history() const { return history_; }
  bool terminated() const { return terminated_; }

  // Plays one round: snapshot of prior records, optional message phase, one
  // decision per agent from that same snapshot, payoff lookup, append.
  // Throws AgentFailure when a backend gives up; the instance then reports
  // terminated() with the partial history preserved.
  RoundRecord run_round();

  // Drives run_round until the round cap, a stop condition, or an agent
  // failure; agent failures are absorbed into the returned history.
  GameHistory run_to_completion();

  // Context and prompt an agent sees when deciding with the given prior
  // records. Exposed so tests can pin the simultaneous-move contract down to
  // the byte level.
  RoundContext make_round_context(size_t agent_index, const std::vector<RoundRecord>& prior,
                                  const std::string& incoming_message) const;
  std::string render_decision_prompt(size_t agent_index, const std::vector<RoundRecord>& prior,
                                     const std::string& incoming_message) const;

 private:
  DecisionRequest make_request(size_t agent_index, const std::vector<RoundRecord>& prior,
                               const std::string& prompt) const;

  GameHistory history_;
  std::vector<BoundAgent> agents_;
  PromptTemplate template_;
  std::uint64_t seed_ = 0;
  int retry_budget_ = 3;
  bool terminated_ = false;
};

// Constructs one backend per agent; llm is the config's model reference.
using AgentFactory = std::function<std::shared_ptr<DecisionBackend>(
    const std::string& llm, const std::string& agent_name)>;

struct InstantiateOptions {
  std::uint64_t campaign_seed = 0;
  int retry_budget = 3;
};

// Algorithmic entry point from setups to runnable instances, order
// preserving. Factory failures abort with the offending setup identified.
std::vector<std::unique_ptr<GameInstance>> instantiate_games(
    const GameConfig& config, const TemplateSet& templates,
    const std::vector<GameSetup>& setups, const AgentFactory& agent_factory,
    const InstantiateOptions& options = {});

// Runs a fresh instance to completion.
GameHistory run_game(GameInstance& game);

}  // namespace gamelab
