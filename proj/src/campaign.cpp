#include "gamelab/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "gamelab/agents.hpp"

namespace gamelab {

const char* kToolVersion = "gamelab 0.1.0";

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t end = text.find(sep, start);
    out.push_back(text.substr(start, end == std::string::npos ? end : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

bool is_scripted_reference(const std::string& llm) { return llm.rfind("scripted:", 0) == 0; }

// Precondition: is_scripted_reference(llm).
std::vector<ScriptedPolicy> parse_scripted_reference(const std::string& llm) {
  std::vector<std::string> names = split(llm.substr(9), ',');
  std::vector<ScriptedPolicy> policies;
  for (const std::string& name : names) {
    auto policy = scripted_policy_from_string(name);
    if (!policy) {
      throw std::invalid_argument("unknown scripted policy \"" + name + "\"");
    }
    policies.push_back(*policy);
  }
  if (policies.empty()) {
    throw std::invalid_argument("scripted llm reference names no policy");
  }
  return policies;
}

}  // namespace

AgentFactory make_agent_factory(const GameConfig& config, const ProfileRegistry& profiles,
                                const GatewayOptions& gateway_options) {
  // Resolve the config's own reference now so a campaign aborts before any
  // output exists instead of failing on the first instantiation.
  if (is_scripted_reference(config.llm)) {
    parse_scripted_reference(config.llm);
  } else if (profiles.find(config.llm) == nullptr) {
    throw std::invalid_argument("unknown model profile \"" + config.llm + "\"");
  }

  auto gateway = std::make_shared<Gateway>(gateway_options);
  ProfileRegistry registry = profiles;
  std::vector<std::string> agent_names = config.agents.names;
  return [gateway, registry, agent_names](const std::string& llm, const std::string& agent_name)
             -> std::shared_ptr<DecisionBackend> {
    if (is_scripted_reference(llm)) {
      std::vector<ScriptedPolicy> policies = parse_scripted_reference(llm);
      size_t slot = 0;
      for (size_t i = 0; i < agent_names.size(); ++i) {
        if (agent_names[i] == agent_name) {
          slot = i;
          break;
        }
      }
      return std::make_shared<ScriptedBackend>(policies[slot % policies.size()]);
    }
    const ModelProfile* profile = registry.find(llm);
    if (profile == nullptr) {
      throw std::invalid_argument("unknown model profile \"" + llm + "\"");
    }
    return std::make_shared<LlmBackend>(gateway, *profile);
  };
}

CampaignResult run_campaign(const GameConfig& config, const TemplateSet& templates,
                            const ProfileRegistry& profiles, const CampaignOptions& options,
                            std::ostream* log) {
  if (options.out_dir.empty()) throw std::invalid_argument("campaign needs an output directory");
  std::filesystem::create_directories(options.out_dir);
  const std::string histories_path = options.out_dir + "/histories.jsonl";
  const std::string manifest_path = options.out_dir + "/manifest.json";
  const std::string replies_path = options.out_dir + "/replies.jsonl";

  const std::string started_at = iso8601_utc_now();

  std::vector<GameSetup> setups =
      enumerate_game_setups(config, options.variants, options.repetitions, options.dedupe_mixed);

  // Resolve the agent backends up front so profile problems abort before any
  // game starts.
  GatewayOptions gateway_options;
  gateway_options.mock_endpoint = options.mock_endpoint;
  AgentFactory factory = make_agent_factory(config, profiles, gateway_options);

  size_t done = 0;
  if (file_exists(histories_path)) {
    if (!options.resume) {
      throw std::runtime_error(histories_path +
                               " already exists; pass --resume or use a fresh --out directory");
    }
    truncate_partial_last_line(histories_path);
    std::vector<std::string> lines = read_complete_lines(histories_path);
    if (lines.size() > setups.size()) {
      throw std::runtime_error("existing histories hold more games than this campaign "
                               "enumerates; refusing to resume");
    }
    for (size_t i = 0; i < lines.size(); ++i) {
      GameHistory persisted = history_from_json_line(lines[i]);
      if (persisted.game.setup_key != setups[i].key()) {
        throw std::runtime_error(
            "existing histories do not match this campaign's enumeration at line " +
            std::to_string(i + 1) + " (found \"" + persisted.game.setup_key +
            "\", expected \"" + setups[i].key() + "\"); refusing to resume");
      }
    }
    done = lines.size();
  } else if (options.resume && log) {
    *log << "nothing to resume; starting fresh\n";
  }

  std::vector<GameSetup> remaining(setups.begin() + static_cast<long>(done), setups.end());
  InstantiateOptions instantiate_options;
  instantiate_options.campaign_seed = options.seed;
  instantiate_options.retry_budget = options.retry_budget;
  std::vector<std::unique_ptr<GameInstance>> games =
      instantiate_games(config, templates, remaining, factory, instantiate_options);

  // Workers fill result slots; the single writer appends strictly in setup
  // order so identical campaigns produce byte-identical files.
  std::vector<std::optional<GameHistory>> results(games.size());
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    while (true) {
      size_t index = next.fetch_add(1);
      if (index >= games.size()) break;
      GameHistory history = games[index]->run_to_completion();
      {
        std::lock_guard<std::mutex> lock(mu);
        results[index] = std::move(history);
      }
      cv.notify_all();
    }
  };

  size_t worker_count =
      std::min<size_t>(std::max(1, options.concurrency), std::max<size_t>(1, games.size()));
  std::vector<std::thread> pool;
  for (size_t i = 0; i < worker_count; ++i) pool.emplace_back(worker);

  size_t newly_run = 0;
  {
    std::ofstream histories(histories_path, std::ios::binary | std::ios::app);
    if (!histories) throw std::runtime_error("cannot write " + histories_path);
    std::ofstream replies;
    if (options.write_replies) {
      replies.open(replies_path, std::ios::binary | std::ios::app);
      if (!replies) throw std::runtime_error("cannot write " + replies_path);
    }

    for (size_t index = 0; index < games.size(); ++index) {
      std::unique_lock<std::mutex> lock(mu);
      cv.wait(lock, [&] { return results[index].has_value(); });
      GameHistory history = std::move(*results[index]);
      results[index].reset();
      lock.unlock();

      histories << history_to_json_line(history) << "\n";
      histories.flush();
      if (options.write_replies) {
        for (const RoundRecord& record : history.records) {
          for (size_t agent = 0; agent < record.raw_replies.size(); ++agent) {
            nlohmann::ordered_json entry;
            entry["key"] = history.game.setup_key;
            entry["round"] = record.round;
            entry["agent"] = history.game.agents[agent].name;
            entry["reply"] = record.raw_replies[agent];
            replies << entry.dump() << "\n";
          }
        }
        replies.flush();
      }
      ++newly_run;
      if (log) {
        *log << "[" << (done + index + 1) << "/" << setups.size() << "] "
             << history.game.setup_key << " -> " << to_string(history.termination) << "\n";
      }
    }
  }
  for (std::thread& t : pool) t.join();

  // Counts come from the file itself, the artifact of record.
  RunManifest manifest;
  manifest.tool = kToolVersion;
  manifest.config_digest = digest_hex(serialize_config(config));
  for (const std::string& language : templates.languages()) {
    manifest.template_digests[language] = digest_hex(templates.at(language).body);
  }
  std::string profile_blob;
  for (const std::string& id : profiles.ids()) {
    profile_blob += serialize_profiles({*profiles.find(id)});
  }
  manifest.profiles_digest = digest_hex(profile_blob);
  manifest.variants = options.variants;
  manifest.repetitions = options.repetitions;
  manifest.seed = options.seed;
  manifest.dedupe_mixed = options.dedupe_mixed;
  manifest.concurrency = options.concurrency;
  manifest.started_at = started_at;
  manifest.finished_at = iso8601_utc_now();
  for (const GameHistory& history : load_histories(histories_path)) {
    manifest.games += 1;
    for (const RoundRecord& record : history.records) {
      manifest.decisions += record.strategies.size();
    }
    if (history.termination == Termination::agent_failure) manifest.failures += 1;
  }
  write_file(manifest_path, manifest_to_json(manifest));

  CampaignResult result;
  result.manifest = std::move(manifest);
  result.newly_run = newly_run;
  result.resumed = done;
  return result;
}

}  // namespace gamelab
