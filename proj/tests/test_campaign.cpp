#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "gamelab/campaign.hpp"
#include "mock_server.hpp"
#include "test_support.hpp"

using namespace gamelab;
using testsupport::MockServer;

namespace {

GameConfig campaign_config(int rounds = 4, const std::vector<std::string>& langs = {"en", "fr"}) {
  auto doc = testsupport::base_config(langs);
  doc["nRounds"] = rounds;
  doc["llm"] = "scripted:tit_for_tat,alternator";
  doc["allAgentPermutations"] = true;
  return parse_config(doc.dump());
}

CampaignOptions scripted_options(const std::string& out_dir) {
  CampaignOptions options;
  options.variants = {"pd_conventional", "pd_harsh+unknown"};
  options.repetitions = 2;
  options.seed = 7;
  options.out_dir = out_dir;
  return options;
}

}  // namespace

TEST_CASE("scripted campaigns persist histories and a manifest") {
  std::string dir = testsupport::scratch_dir("camp");
  GameConfig config = campaign_config();
  TemplateSet templates = testsupport::base_templates({"en", "fr"});
  ProfileRegistry registry;

  std::ostringstream log;
  CampaignResult result =
      run_campaign(config, templates, registry, scripted_options(dir), &log);

  // 3 personality pairs x 2 languages x 2 variants x 2 repetitions
  CHECK(result.newly_run == 24);
  CHECK(result.resumed == 0);
  CHECK(result.manifest.games == 24);
  CHECK(result.manifest.decisions == 24 * 4 * 2);
  CHECK(result.manifest.failures == 0);
  CHECK(result.manifest.tool == kToolVersion);
  CHECK(result.manifest.variants == scripted_options(dir).variants);
  CHECK(result.manifest.seed == 7);
  CHECK(result.manifest.template_digests.size() == 2);
  CHECK_FALSE(result.manifest.started_at.empty());
  CHECK(log.str().find("[1/24]") != std::string::npos);
  CHECK(log.str().find("[24/24]") != std::string::npos);

  auto histories = load_histories(dir + "/histories.jsonl");
  REQUIRE(histories.size() == 24);
  auto setups = enumerate_game_setups(config, scripted_options(dir).variants, 2);
  for (size_t i = 0; i < histories.size(); ++i)
    CHECK(histories[i].game.setup_key == setups[i].key());

  RunManifest manifest = manifest_from_json(read_file(dir + "/manifest.json"));
  CHECK(manifest.games == 24);

  // same seed, fresh directory -> byte-identical data file
  std::string dir2 = testsupport::scratch_dir("camp2");
  run_campaign(config, templates, registry, scripted_options(dir2));
  CHECK(read_file(dir + "/histories.jsonl") == read_file(dir2 + "/histories.jsonl"));

  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("concurrency does not change the bytes") {
  GameConfig config = campaign_config();
  TemplateSet templates = testsupport::base_templates({"en", "fr"});
  ProfileRegistry registry;

  std::string serial_dir = testsupport::scratch_dir("serial");
  CampaignOptions serial = scripted_options(serial_dir);
  serial.concurrency = 1;
  run_campaign(config, templates, registry, serial);

  std::string parallel_dir = testsupport::scratch_dir("parallel");
  CampaignOptions parallel = scripted_options(parallel_dir);
  parallel.concurrency = 8;
  run_campaign(config, templates, registry, parallel);

  CHECK(read_file(serial_dir + "/histories.jsonl") ==
        read_file(parallel_dir + "/histories.jsonl"));
  std::filesystem::remove_all(serial_dir);
  std::filesystem::remove_all(parallel_dir);
}

TEST_CASE("existing output demands --resume or a fresh directory") {
  std::string dir = testsupport::scratch_dir("exists");
  GameConfig config = campaign_config();
  TemplateSet templates = testsupport::base_templates({"en", "fr"});
  ProfileRegistry registry;
  run_campaign(config, templates, registry, scripted_options(dir));
  CHECK_THROWS_AS(run_campaign(config, templates, registry, scripted_options(dir)),
                  std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("resume completes a truncated campaign to identical bytes") {
  GameConfig config = campaign_config();
  TemplateSet templates = testsupport::base_templates({"en", "fr"});
  ProfileRegistry registry;

  std::string full_dir = testsupport::scratch_dir("full");
  run_campaign(config, templates, registry, scripted_options(full_dir));
  std::string full = read_file(full_dir + "/histories.jsonl");

  // keep 5 complete lines plus a torn sixth, then resume
  std::string partial_dir = testsupport::scratch_dir("partial");
  std::vector<std::string> lines;
  {
    std::istringstream in(full);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  REQUIRE(lines.size() == 24);
  std::string prefix;
  for (size_t i = 0; i < 5; ++i) prefix += lines[i] + "\n";
  prefix += lines[5].substr(0, 40);  // torn write
  write_file(partial_dir + "/histories.jsonl", prefix);

  CampaignOptions resume = scripted_options(partial_dir);
  resume.resume = true;
  CampaignResult result = run_campaign(config, templates, registry, resume);
  CHECK(result.resumed == 5);
  CHECK(result.newly_run == 19);
  CHECK(read_file(partial_dir + "/histories.jsonl") == full);

  // resuming a complete campaign runs nothing
  CampaignResult again = run_campaign(config, templates, registry, resume);
  CHECK(again.resumed == 24);
  CHECK(again.newly_run == 0);
  CHECK(read_file(partial_dir + "/histories.jsonl") == full);

  std::filesystem::remove_all(full_dir);
  std::filesystem::remove_all(partial_dir);
}

TEST_CASE("resume refuses lines that are not an enumeration prefix") {
  GameConfig config = campaign_config();
  TemplateSet templates = testsupport::base_templates({"en", "fr"});
  ProfileRegistry registry;

  std::string dir = testsupport::scratch_dir("mismatch");
  run_campaign(config, templates, registry, scripted_options(dir));
  std::string file = dir + "/histories.jsonl";

  // swap the first two lines: still valid JSON, wrong order
  auto lines = read_complete_lines(file);
  std::swap(lines[0], lines[1]);
  std::string swapped;
  for (const auto& line : lines) swapped += line + "\n";
  write_file(file, swapped);

  CampaignOptions resume = scripted_options(dir);
  resume.resume = true;
  CHECK_THROWS_AS(run_campaign(config, templates, registry, resume), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("agent factories resolve scripted policies and profiles") {
  GameConfig config = campaign_config();
  ProfileRegistry registry(default_profiles());
  GatewayOptions gw;

  auto factory = make_agent_factory(config, registry, gw);
  auto first = factory("scripted:tit_for_tat,alternator", "agent1");
  auto second = factory("scripted:tit_for_tat,alternator", "agent2");
  CHECK(dynamic_cast<ScriptedBackend*>(first.get())->policy() == ScriptedPolicy::tit_for_tat);
  CHECK(dynamic_cast<ScriptedBackend*>(second.get())->policy() == ScriptedPolicy::alternator);

  // one policy fans out to every seat
  auto lone = factory("scripted:always_b", "agent2");
  CHECK(dynamic_cast<ScriptedBackend*>(lone.get())->policy() == ScriptedPolicy::always_b);

  CHECK_THROWS_AS(factory("scripted:flip_a_coin", "agent1"), std::invalid_argument);
  CHECK_THROWS_AS(factory("unlisted-model", "agent1"), std::invalid_argument);
  CHECK(dynamic_cast<LlmBackend*>(factory("gpt-4", "agent1").get()) != nullptr);
}

TEST_CASE("llm campaigns run end to end against a mock server") {
  MockServer server;
  server.set_responder([](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    std::string prompt = body["messages"][0]["content"];
    // cooperate unless the opponent defected last round
    bool defected = prompt.find("the other agent chose Option A") != std::string::npos;
    MockServer::reply_openai(res, defected ? "Option A" : "I pick Option B.");
  });

  auto doc = testsupport::base_config();
  doc["nRounds"] = 5;
  doc["llm"] = "mock-model";
  GameConfig config = parse_config(doc.dump());
  TemplateSet templates = testsupport::base_templates();

  ProfileRegistry registry;
  ModelProfile profile;
  profile.id = "mock-model";
  profile.kind = ProviderKind::openai_style;
  profile.model_version = "mock-1";
  profile.endpoint = server.url();
  profile.credentials_env = "GAMELAB_TEST_MOCK_KEY";
  registry.add(profile);
  setenv("GAMELAB_TEST_MOCK_KEY", "super-secret-credential-value", 1);

  std::string dir = testsupport::scratch_dir("llm");
  CampaignOptions options;
  options.variants = {"pd_conventional"};
  options.out_dir = dir;
  options.write_replies = true;
  CampaignResult result = run_campaign(config, templates, registry, options);

  CHECK(result.manifest.games == 1);
  CHECK(result.manifest.failures == 0);
  auto histories = load_histories(dir + "/histories.jsonl");
  REQUIRE(histories.size() == 1);
  CHECK(histories[0].termination == Termination::completed_all_rounds);
  CHECK(histories[0].records.size() == 5);
  CHECK(server.call_count() == 10);  // 5 rounds x 2 agents, no retries

  // raw replies only in the opt-in sidecar, never in the history file
  std::string history_bytes = read_file(dir + "/histories.jsonl");
  CHECK(history_bytes.find("I pick Option B.") == std::string::npos);
  std::string sidecar = read_file(dir + "/replies.jsonl");
  CHECK(sidecar.find("I pick Option B.") != std::string::npos);

  // the credential value stays out of every artifact
  for (const std::string& name : {"histories.jsonl", "manifest.json", "replies.jsonl"}) {
    CHECK(read_file(dir + "/" + name).find("super-secret-credential-value") ==
          std::string::npos);
  }

  unsetenv("GAMELAB_TEST_MOCK_KEY");
  std::filesystem::remove_all(dir);
}

TEST_CASE("llm agent failures are recorded and the campaign continues") {
  MockServer server;
  server.set_responder([](const httplib::Request&, httplib::Response& res) {
    MockServer::reply_openai(res, "???");
  });

  auto doc = testsupport::base_config({"en", "fr"});
  doc["nRounds"] = 3;
  doc["llm"] = "mock-model";
  GameConfig config = parse_config(doc.dump());
  TemplateSet templates = testsupport::base_templates({"en", "fr"});

  ProfileRegistry registry;
  ModelProfile profile;
  profile.id = "mock-model";
  profile.kind = ProviderKind::openai_style;
  profile.model_version = "mock-1";
  profile.endpoint = server.url();
  registry.add(profile);

  std::string dir = testsupport::scratch_dir("llmfail");
  CampaignOptions options;
  options.variants = {"pd_conventional"};
  options.out_dir = dir;
  options.retry_budget = 2;
  CampaignResult result = run_campaign(config, templates, registry, options);

  CHECK(result.manifest.games == 2);  // en + fr
  CHECK(result.manifest.failures == 2);
  auto histories = load_histories(dir + "/histories.jsonl");
  for (const auto& h : histories) {
    CHECK(h.termination == Termination::agent_failure);
    CHECK(h.records.empty());  // round 1 never completed
    REQUIRE(h.failure.has_value());
    CHECK(h.failure->agent_name == "agent1");
  }
  // 1 + retry_budget prompts per failing decision, first agent of each game
  CHECK(server.call_count() == 6);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unknown llm references abort before any game runs") {
  GameConfig config = campaign_config();
  auto doc = testsupport::base_config();
  doc["llm"] = "no-such-model";
  config = parse_config(doc.dump());
  TemplateSet templates = testsupport::base_templates();
  ProfileRegistry registry;

  std::string dir = testsupport::scratch_dir("nomodel");
  CampaignOptions options;
  options.variants = {"pd_conventional"};
  options.out_dir = dir;
  CHECK_THROWS_AS(run_campaign(config, templates, registry, options), std::invalid_argument);
  CHECK_FALSE(file_exists(dir + "/histories.jsonl"));
  std::filesystem::remove_all(dir);
}
