#include <doctest.h>

#include <random>
#include <set>

#include "gamelab/agents.hpp"
#include "oracle_sim.hpp"

using namespace gamelab;

static const std::vector<std::string> kIds = {"A", "B"};
static const std::vector<std::string> kLabels = {"Option A", "Option B"};

TEST_CASE("exact id or label replies parse") {
  CHECK(parse_strategy_response("A", kIds, kLabels).strategy_index == 0);
  CHECK(parse_strategy_response("  B \n", kIds, kLabels).strategy_index == 1);
  CHECK(parse_strategy_response("Option B", kIds, kLabels).strategy_index == 1);
  CHECK(parse_strategy_response("option a", kIds, kLabels).strategy_index == 0);
}

TEST_CASE("substring matching is case-insensitive and must be unique") {
  auto one = parse_strategy_response("I will go with Option B.", kIds, kLabels);
  CHECK(one.outcome == ParseOutcome::ok);
  CHECK(one.strategy_index == 1);

  auto both = parse_strategy_response("Option A or Option B? Hard to say.", kIds, kLabels);
  CHECK(both.outcome == ParseOutcome::ambiguous_match);

  auto neither = parse_strategy_response("no comment.", kIds, kLabels);
  CHECK(neither.outcome == ParseOutcome::no_match);

  // single-letter ids make most prose ambiguous or a false hit; longer text
  // containing both letters must refuse, not guess
  auto chatty = parse_strategy_response("Well, maybe... but who knows", kIds, kLabels);
  CHECK(chatty.outcome == ParseOutcome::ambiguous_match);
}

TEST_CASE("distinct labels keep substring hits unambiguous") {
  std::vector<std::string> ids = {"A", "B"};
  std::vector<std::string> labels = {"cooperate", "defect"};
  auto parsed = parse_strategy_response("I choose to DEFECT!", ids, labels);
  CHECK(parsed.outcome == ParseOutcome::ok);
  CHECK(parsed.strategy_index == 1);
}

static DecisionRequest request_for(const std::vector<int>& own, const std::vector<int>& opp,
                                   std::uint64_t seed = 7) {
  DecisionRequest req;
  req.prompt = "irrelevant";
  req.strategy_ids = kIds;
  req.strategy_labels = kLabels;
  req.history = {own, opp, static_cast<int>(own.size()) + 1};
  req.seed = seed;
  req.agent_name = "agent1";
  return req;
}

TEST_CASE("scripted policies mirror the independent oracle") {
  struct Pair {
    ScriptedPolicy mine;
    oracle::Policy reference;
  };
  std::vector<Pair> pairs = {
      {ScriptedPolicy::always_a, oracle::always(0)},
      {ScriptedPolicy::always_b, oracle::always(1)},
      {ScriptedPolicy::tit_for_tat, oracle::tit_for_tat()},
      {ScriptedPolicy::grim_trigger, oracle::grim_trigger()},
      {ScriptedPolicy::alternator, oracle::alternator()},
  };

  std::mt19937 rng(99);
  for (const auto& [mine, reference] : pairs) {
    ScriptedBackend backend(mine);
    for (int trial = 0; trial < 20; ++trial) {
      size_t len = rng() % 6;
      std::vector<int> own, opp;
      for (size_t i = 0; i < len; ++i) {
        own.push_back(static_cast<int>(rng() % 2));
        opp.push_back(static_cast<int>(rng() % 2));
      }
      Decision d = backend.decide(request_for(own, opp));
      CHECK(d.strategy_index == reference(own, opp));
    }
  }
}

TEST_CASE("random_uniform is seed-deterministic") {
  ScriptedBackend backend(ScriptedPolicy::random_uniform);
  std::vector<int> a, b;
  for (int round = 1; round <= 40; ++round) {
    std::vector<int> history(static_cast<size_t>(round - 1), 0);
    a.push_back(backend.decide(request_for(history, history, 1234)).strategy_index);
    b.push_back(backend.decide(request_for(history, history, 1234)).strategy_index);
  }
  CHECK(a == b);
  CHECK(std::set<int>(a.begin(), a.end()).size() == 2);  // both options show up

  std::vector<int> c;
  for (int round = 1; round <= 40; ++round) {
    std::vector<int> history(static_cast<size_t>(round - 1), 0);
    c.push_back(backend.decide(request_for(history, history, 99)).strategy_index);
  }
  CHECK(a != c);
}

TEST_CASE("policy names round trip") {
  for (const auto& name : scripted_policy_names()) {
    auto policy = scripted_policy_from_string(name);
    REQUIRE(policy.has_value());
    CHECK(to_string(*policy) == name);
  }
  CHECK_FALSE(scripted_policy_from_string("nope").has_value());
}
