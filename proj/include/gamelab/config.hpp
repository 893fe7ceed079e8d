#pragma once

#include <string>
#include <vector>

#include "gamelab/errors.hpp"
#include "gamelab/ordered_dict.hpp"
#include "gamelab/validation.hpp"

namespace gamelab {

enum class Orientation { penalty, reward };

std::string to_string(Orientation o);

// Agent block of the configuration file. `personalities` maps language code
// to (personality id -> localized personality sentence); the id "none" marks
// the no-personality cell and renders as an empty sentence.
struct AgentsBlock {
  std::vector<std::string> names;
  OrderedDict<OrderedDict<std::string>> personalities;
  std::vector<double> opponent_personality_prob;  // one per agent, in [0,1]

  friend bool operator==(const AgentsBlock&, const AgentsBlock&) = default;
};

// Declarative payoff matrix. Combination labels are the strategy ids of the
// players concatenated in player order ("AB" = player 1 plays A, player 2
// plays B); `matrix` maps each label to one weight id per player.
struct PayoffMatrixSpec {
  OrderedDict<double> weights;
  OrderedDict<OrderedDict<std::string>> strategies;  // language -> (id -> label)
  std::vector<std::string> combinations;
  OrderedDict<std::vector<std::string>> matrix;
  Orientation orientation = Orientation::penalty;

  friend bool operator==(const PayoffMatrixSpec&, const PayoffMatrixSpec&) = default;
};

// Typed image of a configuration document, defaults resolved.
struct GameConfig {
  std::string name;
  int n_rounds = 1;
  bool n_rounds_is_known = true;
  std::string llm;
  std::vector<std::string> languages;
  bool all_agent_permutations = false;
  AgentsBlock agents;
  PayoffMatrixSpec payoff_matrix;
  std::vector<std::string> stop_game_when;
  bool agents_communicate = false;
  std::string variant_id = "config";  // extension field: names the config's own matrix

  // Canonical personality-id order: declaration order in the first configured
  // language. Permutation expansion and literal assignments both use it.
  std::vector<std::string> personality_ids() const;

  // Canonical strategy-id order, same convention.
  std::vector<std::string> strategy_ids() const;

  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

// One agent pairing drawn from the personality space.
struct AgentAssignment {
  struct Slot {
    std::string name;
    std::string personality_id;
    bool disclose = false;  // personality revealed to opponents (prob > 0)

    friend bool operator==(const Slot&, const Slot&) = default;
  };
  std::vector<Slot> slots;

  // "cooperative+selfish" style key, ids in slot order.
  std::string combo_key() const;

  friend bool operator==(const AgentAssignment&, const AgentAssignment&) = default;
};

// One concrete game to run: a point in assignment x language x variant x
// repetition space.
struct GameSetup {
  AgentAssignment assignment;
  std::string language;
  std::string variant_id;
  int repetition = 0;

  // Stable identity used for resume bookkeeping and seed derivation.
  std::string key() const;

  friend bool operator==(const GameSetup&, const GameSetup&) = default;
};

// Parses and types a configuration document. Throws ConfigError on syntax
// errors (with byte position), missing required fields (naming the field),
// type mismatches, and n_rounds < 1.
GameConfig parse_config(const std::string& text);

// Emits a document that parse_config maps back to an equal GameConfig.
std::string serialize_config(const GameConfig& config);

// Checks every cross-field invariant; all violations come back as findings.
ValidationReport validate_config(const GameConfig& config);

// Expands the personality space. With dedupe_mixed (the default) assignments
// that differ only by agent order collapse to one canonical representative
// (personality ids sorted lexicographically); without it the full Cartesian
// product is returned. When all_agent_permutations is off, returns the single
// assignment given by the config's declaration order.
std::vector<AgentAssignment> expand_agent_permutations(const GameConfig& config,
                                                       bool dedupe_mixed = true);

// Full campaign enumeration, assignment-major then language, variant,
// repetition. Size is exactly |assignments| * |languages| * |variants| *
// repetitions. Throws std::invalid_argument on empty variants or
// repetitions < 1.
std::vector<GameSetup> enumerate_game_setups(const GameConfig& config,
                                             const std::vector<std::string>& variants,
                                             int repetitions,
                                             bool dedupe_mixed = true);

}  // namespace gamelab
