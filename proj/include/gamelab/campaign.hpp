#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gamelab/config.hpp"
#include "gamelab/engine.hpp"
#include "gamelab/gateway.hpp"
#include "gamelab/persistence.hpp"
#include "gamelab/prompt.hpp"

namespace gamelab {

extern const char* kToolVersion;

struct CampaignOptions {
  std::vector<std::string> variants = {"config"};
  int repetitions = 1;
  std::uint64_t seed = 0;
  int concurrency = 1;
  bool dedupe_mixed = true;
  bool resume = false;
  std::string out_dir;
  int retry_budget = 3;
  bool write_replies = false;  // opt-in raw-reply sidecar (replies.jsonl)
  std::optional<std::string> mock_endpoint;
};

struct CampaignResult {
  RunManifest manifest;
  size_t newly_run = 0;  // games executed by this invocation
  size_t resumed = 0;    // lines already present and kept
};

// Backend factory for a config's llm reference: "scripted:<policy>" (or
// "scripted:<p1>,<p2>" per agent slot) builds strategy policies; anything
// else must name a profile in the registry.
AgentFactory make_agent_factory(const GameConfig& config, const ProfileRegistry& profiles,
                                const GatewayOptions& gateway_options);

// Enumerates, executes, and persists a campaign: histories stream to
// <out>/histories.jsonl in setup order (single writer, so reruns are
// byte-identical), the manifest lands in <out>/manifest.json at completion.
// With resume, existing complete lines must form a prefix of the enumeration
// (a torn final line is truncated away first); without it the output file
// must not yet exist. Per-game agent failures are recorded and the campaign
// continues; config/profile problems throw before any game starts.
CampaignResult run_campaign(const GameConfig& config, const TemplateSet& templates,
                            const ProfileRegistry& profiles, const CampaignOptions& options,
                            std::ostream* log = nullptr);

}  // namespace gamelab
