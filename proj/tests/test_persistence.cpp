#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gamelab/persistence.hpp"
#include "test_support.hpp"

using namespace gamelab;

TEST_CASE("digests are stable lowercase hex") {
  CHECK(digest_hex("abc").size() == 16);
  CHECK(digest_hex("abc") == digest_hex("abc"));
  CHECK(digest_hex("abc") != digest_hex("abd"));
  for (char c : digest_hex("anything")) CHECK(std::string("0123456789abcdef").find(c) != std::string::npos);
}

TEST_CASE("history lines round-trip byte-identically") {
  GameHistory history = testsupport::run_pair(ScriptedPolicy::tit_for_tat,
                                              ScriptedPolicy::alternator, "pd_conventional", 6);
  std::string line = history_to_json_line(history);
  CHECK(line.find('\n') == std::string::npos);

  GameHistory loaded = history_from_json_line(line);
  CHECK(history_to_json_line(loaded) == line);

  CHECK(loaded.game.setup_key == history.game.setup_key);
  CHECK(loaded.game.variant_id == history.game.variant_id);
  CHECK(loaded.game.language == history.game.language);
  CHECK(loaded.termination == history.termination);
  REQUIRE(loaded.records.size() == history.records.size());
  for (size_t i = 0; i < loaded.records.size(); ++i) {
    CHECK(loaded.records[i].strategies == history.records[i].strategies);
    CHECK(loaded.records[i].scores == history.records[i].scores);
    // raw text never persists, digests do
    CHECK(loaded.records[i].raw_replies.empty());
    REQUIRE(loaded.records[i].reply_digests.size() == 2);
    CHECK(loaded.records[i].reply_digests[0] ==
          digest_hex(history.records[i].raw_replies[0]));
  }
}

TEST_CASE("raw reply text never appears in the serialized line") {
  GameHistory history = testsupport::run_pair(ScriptedPolicy::always_a, ScriptedPolicy::always_b,
                                              "pd_conventional", 2);
  history.records[0].raw_replies[0] = "SECRET_VERBATIM_REPLY";
  std::string line = history_to_json_line(history);
  CHECK(line.find("SECRET_VERBATIM_REPLY") == std::string::npos);
  CHECK(line.find(digest_hex("SECRET_VERBATIM_REPLY")) != std::string::npos);
}

TEST_CASE("failure terminations round-trip") {
  GameHistory history = testsupport::run_pair(ScriptedPolicy::always_a, ScriptedPolicy::always_a,
                                              "pd_conventional", 2);
  history.termination = Termination::agent_failure;
  history.failure = AgentFailureInfo{"agent2", "no valid strategy choice after 4 attempts"};
  GameHistory loaded = history_from_json_line(history_to_json_line(history));
  CHECK(loaded.termination == Termination::agent_failure);
  REQUIRE(loaded.failure.has_value());
  CHECK(loaded.failure->agent_name == "agent2");
  CHECK(loaded.failure->message == "no valid strategy choice after 4 attempts");
}

TEST_CASE("file helpers create parents and report existence") {
  std::string dir = testsupport::scratch_dir("files");
  std::string nested = dir + "/a/b/c.txt";
  CHECK_FALSE(file_exists(nested));
  write_file(nested, "payload");
  CHECK(file_exists(nested));
  CHECK(read_file(nested) == "payload");
  CHECK_THROWS_AS(read_file(dir + "/missing.txt"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("torn trailing lines are dropped and truncatable") {
  std::string dir = testsupport::scratch_dir("torn");
  std::string path = dir + "/histories.jsonl";
  write_file(path, "{\"a\":1}\n{\"b\":2}\n{\"torn\":");

  auto lines = read_complete_lines(path);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "{\"a\":1}");
  CHECK(lines[1] == "{\"b\":2}");

  CHECK(truncate_partial_last_line(path));
  CHECK(read_file(path) == "{\"a\":1}\n{\"b\":2}\n");
  CHECK_FALSE(truncate_partial_last_line(path));  // already clean
  CHECK(read_complete_lines(dir + "/absent.jsonl").empty());
  std::filesystem::remove_all(dir);
}

TEST_CASE("load_histories reads what campaigns write") {
  std::string dir = testsupport::scratch_dir("load");
  std::string path = dir + "/histories.jsonl";
  GameHistory a = testsupport::run_pair(ScriptedPolicy::always_a, ScriptedPolicy::always_a,
                                        "pd_conventional", 3);
  GameHistory b = testsupport::run_pair(ScriptedPolicy::always_b, ScriptedPolicy::always_b,
                                        "pd_harsh", 2);
  write_file(path, history_to_json_line(a) + "\n" + history_to_json_line(b) + "\n");
  auto loaded = load_histories(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].game.variant_id == "pd_conventional");
  CHECK(loaded[1].game.variant_id == "pd_harsh");
  CHECK(final_scores(loaded[0]) == std::vector<double>{18, 18});
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest round-trips") {
  RunManifest manifest;
  manifest.tool = "gamelab 0.1.0";
  manifest.config_digest = digest_hex("config");
  manifest.template_digests = {{"en", digest_hex("ten")}, {"fr", digest_hex("tfr")}};
  manifest.profiles_digest = digest_hex("profiles");
  manifest.variants = {"pd_conventional+known", "pd_harsh+unknown"};
  manifest.repetitions = 5;
  manifest.seed = 424242;
  manifest.dedupe_mixed = false;
  manifest.concurrency = 8;
  manifest.started_at = "2025-03-01T10:00:00Z";
  manifest.finished_at = "2025-03-01T10:05:00Z";
  manifest.games = 90;
  manifest.decisions = 1800;
  manifest.failures = 3;

  RunManifest loaded = manifest_from_json(manifest_to_json(manifest));
  CHECK(loaded == manifest);
}

TEST_CASE("timestamps are ISO 8601 UTC") {
  std::string now = iso8601_utc_now();
  REQUIRE(now.size() == 20);
  CHECK(now[4] == '-');
  CHECK(now[10] == 'T');
  CHECK(now.back() == 'Z');
}
