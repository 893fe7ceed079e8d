#include "gamelab/engine.hpp"

#include <cstdio>
#include <stdexcept>

#include "gamelab/hash.hpp"

namespace gamelab {

namespace {

// Compact decimal for prompt text: integers stay integers ("6", not "6.0").
std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

std::string score_noun(Orientation orientation) {
  return orientation == Orientation::penalty ? "penalty" : "score";
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed_all_rounds: return "completed_all_rounds";
    case Termination::stop_condition: return "stop_condition";
    case Termination::agent_failure: return "agent_failure";
  }
  return "completed_all_rounds";
}

Termination termination_from_string(const std::string& s) {
  if (s == "completed_all_rounds") return Termination::completed_all_rounds;
  if (s == "stop_condition") return Termination::stop_condition;
  if (s == "agent_failure") return Termination::agent_failure;
  throw std::invalid_argument("unknown termination \"" + s + "\"");
}

VariantSpec parse_variant(const std::string& variant_id) {
  VariantSpec spec;
  auto plus = variant_id.find('+');
  spec.base = variant_id.substr(0, plus);
  if (spec.base.empty()) {
    throw std::invalid_argument("variant id \"" + variant_id + "\" has no base");
  }
  if (plus != std::string::npos) {
    std::string suffix = variant_id.substr(plus + 1);
    if (suffix == "known") {
      spec.rounds_known = true;
    } else if (suffix == "unknown") {
      spec.rounds_known = false;
    } else {
      throw std::invalid_argument("variant suffix \"+" + suffix +
                                  "\" is not \"+known\" or \"+unknown\"");
    }
  }
  return spec;
}

std::string base_variant(const std::string& variant_id) {
  return variant_id.substr(0, variant_id.find('+'));
}

std::vector<double> final_scores(const GameHistory& history) {
  size_t players = history.game.agents.size();
  std::vector<double> totals(players, 0.0);
  for (const RoundRecord& record : history.records) {
    for (size_t i = 0; i < players && i < record.scores.size(); ++i) {
      totals[i] += record.scores[i];
    }
  }
  return totals;
}

bool check_stop_condition(const GameHistory& history,
                          const std::vector<std::string>& stop_game_when) {
  if (history.records.empty() || stop_game_when.empty()) return false;
  const RoundRecord& last = history.records.back();
  std::vector<size_t> indices(last.strategies.begin(), last.strategies.end());
  std::string label = combination_label(history.game.matrix, indices);
  for (const std::string& stop : stop_game_when) {
    if (stop == label) return true;
  }
  return false;
}

GameInstance::GameInstance(GameDescriptor descriptor, std::vector<BoundAgent> agents,
                           PromptTemplate tpl, std::uint64_t seed, int retry_budget)
    : agents_(std::move(agents)),
      template_(std::move(tpl)),
      seed_(seed),
      retry_budget_(retry_budget) {
  history_.game = std::move(descriptor);
  if (agents_.size() != 2 || history_.game.matrix.players() != 2) {
    throw std::invalid_argument("the engine runs exactly two-player games");
  }
  if (history_.game.agents.size() != agents_.size()) {
    throw std::invalid_argument("descriptor and bound agents disagree on the player count");
  }
}

RoundContext GameInstance::make_round_context(size_t agent_index,
                                              const std::vector<RoundRecord>& prior,
                                              const std::string& incoming_message) const {
  const GameDescriptor& game = history_.game;
  const size_t opponent_index = 1 - agent_index;
  const std::string noun = score_noun(game.matrix.orientation);

  RoundContext ctx;
  ctx.game_name = game.game_name;
  ctx.n_rounds = game.n_rounds;
  ctx.current_round = static_cast<int>(prior.size()) + 1;
  ctx.n_rounds_is_known = game.rounds_known;
  ctx.personality_text = agents_[agent_index].personality_text;

  const double q = game.agents[opponent_index].disclosure_prob;
  const std::string& opp_text = agents_[opponent_index].personality_text;
  if (q > 0.0 && !opp_text.empty()) {
    if (q >= 1.0) {
      ctx.opponent_personality_text = "Your opponent's personality: " + opp_text;
    } else {
      ctx.opponent_personality_text =
          "With probability " + format_number(q) + ", your opponent's personality: " + opp_text;
    }
  }

  ctx.strategies = game.strategy_labels;

  const size_t n = game.matrix.strategy_ids.size();
  std::string payoff_text;
  for (size_t mine = 0; mine < n; ++mine) {
    for (size_t theirs = 0; theirs < n; ++theirs) {
      std::vector<size_t> joint(2);
      joint[agent_index] = mine;
      joint[opponent_index] = theirs;
      const std::vector<double>& scores =
          compute_payoff(game.matrix, combination_label(game.matrix, joint));
      if (!payoff_text.empty()) payoff_text += " ";
      payoff_text += "If you choose " + game.strategy_labels[mine] +
                     " and the other agent chooses " + game.strategy_labels[theirs] +
                     ", your " + noun + " is " + format_number(scores[agent_index]) +
                     " and theirs is " + format_number(scores[opponent_index]) + ".";
    }
  }
  ctx.payoff_description = payoff_text;

  std::string history_text;
  for (const RoundRecord& record : prior) {
    if (!history_text.empty()) history_text += "\n";
    const int own = record.strategies[agent_index];
    const int opp = record.strategies[opponent_index];
    history_text += "Round " + std::to_string(record.round) + ": you chose " +
                    game.strategy_labels[static_cast<size_t>(own)] +
                    "; the other agent chose " +
                    game.strategy_labels[static_cast<size_t>(opp)] + ". Your " + noun + ": " +
                    format_number(record.scores[agent_index]) + ". Theirs: " +
                    format_number(record.scores[opponent_index]) + ".";
  }
  ctx.history_text = history_text;
  ctx.incoming_message = incoming_message;
  return ctx;
}

std::string GameInstance::render_decision_prompt(size_t agent_index,
                                                 const std::vector<RoundRecord>& prior,
                                                 const std::string& incoming_message) const {
  return render_prompt(template_, make_round_context(agent_index, prior, incoming_message));
}

DecisionRequest GameInstance::make_request(size_t agent_index,
                                           const std::vector<RoundRecord>& prior,
                                           const std::string& prompt) const {
  const GameDescriptor& game = history_.game;
  DecisionRequest request;
  request.prompt = prompt;
  request.strategy_ids = game.matrix.strategy_ids;
  request.strategy_labels = game.strategy_labels;
  request.history.round = static_cast<int>(prior.size()) + 1;
  for (const RoundRecord& record : prior) {
    request.history.own.push_back(record.strategies[agent_index]);
    request.history.opponent.push_back(record.strategies[1 - agent_index]);
  }
  request.seed = mix64(seed_, static_cast<std::uint64_t>(agent_index));
  request.agent_name = agents_[agent_index].handle.name;
  request.retry_budget = retry_budget_;
  return request;
}

RoundRecord GameInstance::run_round() {
  if (terminated_) throw std::logic_error("game already terminated");
  const GameDescriptor& game = history_.game;

  // The snapshot every agent acts on: nothing from this round leaks in.
  const std::vector<RoundRecord> snapshot = history_.records;
  const int round = static_cast<int>(snapshot.size()) + 1;

  std::vector<std::string> messages(agents_.size());
  std::vector<int> choices(agents_.size(), -1);
  std::vector<std::string> raw_replies(agents_.size());

  size_t acting = 0;
  try {
    if (game.agents_communicate) {
      for (size_t i = 0; i < agents_.size(); ++i) {
        acting = i;
        // Message phase sees the snapshot plus the opponent's previous-round
        // message, never anything from the current round.
        std::string prev_incoming;
        if (!snapshot.empty() && !snapshot.back().messages.empty()) {
          prev_incoming = snapshot.back().messages[1 - i];
        }
        std::string prompt = render_decision_prompt(i, snapshot, prev_incoming);
        messages[i] = agents_[i].handle.backend->compose_message(
            make_request(i, snapshot, prompt));
      }
    }
    for (size_t i = 0; i < agents_.size(); ++i) {
      acting = i;
      std::string incoming = game.agents_communicate ? messages[1 - i] : "";
      std::string prompt = render_decision_prompt(i, snapshot, incoming);
      Decision decision = agents_[i].handle.backend->decide(make_request(i, snapshot, prompt));
      choices[i] = decision.strategy_index;
      raw_replies[i] = decision.raw_reply;
    }
  } catch (const AgentFailure& failure) {
    terminated_ = true;
    history_.termination = Termination::agent_failure;
    history_.failure = AgentFailureInfo{failure.agent_name(), failure.what()};
    throw;
  } catch (const GatewayError& error) {
    terminated_ = true;
    history_.termination = Termination::agent_failure;
    const std::string& name = agents_[acting].handle.name;
    history_.failure = AgentFailureInfo{name, error.what()};
    throw AgentFailure(name, error.what());
  }

  RoundRecord record;
  record.round = round;
  record.strategies = choices;
  std::vector<size_t> indices(choices.begin(), choices.end());
  record.scores = compute_payoff(game.matrix, combination_label(game.matrix, indices));
  if (game.agents_communicate) record.messages = messages;
  record.raw_replies = raw_replies;
  history_.records.push_back(record);

  if (check_stop_condition(history_, game.stop_game_when)) {
    terminated_ = true;
    history_.termination = Termination::stop_condition;
  } else if (round >= game.n_rounds) {
    terminated_ = true;
    history_.termination = Termination::completed_all_rounds;
  }
  return record;
}

GameHistory GameInstance::run_to_completion() {
  while (!terminated_) {
    try {
      run_round();
    } catch (const AgentFailure&) {
      break;  // absorbed: termination and failure info already recorded
    }
  }
  return history_;
}

std::vector<std::unique_ptr<GameInstance>> instantiate_games(
    const GameConfig& config, const TemplateSet& templates,
    const std::vector<GameSetup>& setups, const AgentFactory& agent_factory,
    const InstantiateOptions& options) {
  std::vector<std::unique_ptr<GameInstance>> games;
  games.reserve(setups.size());

  for (const GameSetup& setup : setups) {
    VariantSpec variant = parse_variant(setup.variant_id);

    PayoffMatrix matrix;
    if (auto preset = builtin_preset(variant.base)) {
      matrix = std::move(*preset);
    } else if (variant.base == "config" || variant.base == config.variant_id) {
      matrix = resolve_payoff_matrix(config);
    } else {
      throw std::invalid_argument("unknown variant \"" + variant.base + "\" in setup " +
                                  setup.key());
    }

    const PromptTemplate* tpl = templates.find(setup.language);
    if (tpl == nullptr) {
      throw std::logic_error("no template for language \"" + setup.language + "\" in setup " +
                             setup.key());
    }

    // Localized labels where the config defines this variant's strategy ids;
    // neutral "Option <id>" otherwise (built-in matrix with foreign ids).
    std::vector<std::string> labels;
    const OrderedDict<std::string>* localized =
        config.payoff_matrix.strategies.find(setup.language);
    for (const std::string& id : matrix.strategy_ids) {
      const std::string* label = localized ? localized->find(id) : nullptr;
      labels.push_back(label ? *label : "Option " + id);
    }

    GameDescriptor descriptor;
    descriptor.game_name = config.name;
    descriptor.llm = config.llm;
    descriptor.language = setup.language;
    descriptor.variant_id = setup.variant_id;
    descriptor.setup_key = setup.key();
    descriptor.repetition = setup.repetition;
    descriptor.n_rounds = config.n_rounds;
    descriptor.rounds_known = variant.rounds_known.value_or(config.n_rounds_is_known);
    descriptor.agents_communicate = config.agents_communicate;
    descriptor.stop_game_when = config.stop_game_when;
    descriptor.matrix = std::move(matrix);
    descriptor.strategy_labels = std::move(labels);

    std::vector<BoundAgent> bound;
    for (size_t i = 0; i < setup.assignment.slots.size(); ++i) {
      const AgentAssignment::Slot& slot = setup.assignment.slots[i];
      AgentInfo info;
      info.name = slot.name;
      info.personality_id = slot.personality_id;
      info.disclosure_prob = i < config.agents.opponent_personality_prob.size()
                                 ? config.agents.opponent_personality_prob[i]
                                 : 0.0;
      descriptor.agents.push_back(info);

      BoundAgent agent;
      agent.handle.name = slot.name;
      agent.handle.personality_id = slot.personality_id;
      agent.handle.language = setup.language;
      if (slot.personality_id != "none") {
        const OrderedDict<std::string>* texts =
            config.agents.personalities.find(setup.language);
        const std::string* text = texts ? texts->find(slot.personality_id) : nullptr;
        if (text == nullptr) {
          throw std::logic_error("personality \"" + slot.personality_id +
                                 "\" missing for language \"" + setup.language + "\" in setup " +
                                 setup.key());
        }
        agent.personality_text = *text;
      }
      try {
        agent.handle.backend = agent_factory(config.llm, slot.name);
      } catch (const std::exception& e) {
        throw std::runtime_error("agent factory failed for setup " + setup.key() + ": " +
                                 e.what());
      }
      if (!agent.handle.backend) {
        throw std::runtime_error("agent factory returned no backend for setup " + setup.key());
      }
      bound.push_back(std::move(agent));
    }

    std::uint64_t seed = mix64(fnv1a64(setup.key()), options.campaign_seed);
    games.push_back(std::make_unique<GameInstance>(std::move(descriptor), std::move(bound),
                                                   *tpl, seed, options.retry_budget));
  }
  return games;
}

GameHistory run_game(GameInstance& game) { return game.run_to_completion(); }

}  // namespace gamelab
