#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gamelab/engine.hpp"

namespace gamelab {

// 16-hex-char content digest (used for raw replies and input files).
std::string digest_hex(const std::string& bytes);

// One self-contained history line, no trailing newline and no timestamps, so
// identical campaigns serialize byte-identically. Raw reply text appears only
// as digests.
std::string history_to_json_line(const GameHistory& history);

// Inverse of history_to_json_line; raw_replies stay empty (only digests are
// persisted), reply_digests carry what the line stored.
GameHistory history_from_json_line(const std::string& line);

// Whole-file helpers. read_file throws std::runtime_error when the path is
// unreadable; write_file creates parent directories.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);

// Complete lines of a JSON-lines file, newline stripped. A trailing chunk
// without a final newline is a torn write and is dropped. A missing file
// reads as no lines.
std::vector<std::string> read_complete_lines(const std::string& path);

// Rewrites the file without a torn trailing chunk, if one exists. Returns
// true when a truncation happened.
bool truncate_partial_last_line(const std::string& path);

std::vector<GameHistory> load_histories(const std::string& path);

// Reproducibility envelope of one campaign run; lives beside histories.jsonl
// so the data file itself stays timestamp-free.
struct RunManifest {
  std::string tool;
  std::string config_digest;
  std::map<std::string, std::string> template_digests;  // language -> digest
  std::string profiles_digest;
  std::vector<std::string> variants;
  int repetitions = 1;
  std::uint64_t seed = 0;
  bool dedupe_mixed = true;
  int concurrency = 1;
  std::string started_at;   // ISO 8601 UTC
  std::string finished_at;
  size_t games = 0;      // history lines on disk
  size_t decisions = 0;  // recorded moves across all lines
  size_t failures = 0;   // lines with an agent_failure termination

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

std::string iso8601_utc_now();

}  // namespace gamelab
