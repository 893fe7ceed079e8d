#include "gamelab/cli.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>

#include "gamelab/analytics.hpp"
#include "gamelab/campaign.hpp"
#include "gamelab/config.hpp"
#include "gamelab/engine.hpp"
#include "gamelab/gateway.hpp"
#include "gamelab/persistence.hpp"
#include "gamelab/prompt.hpp"

namespace gamelab {

namespace {

constexpr int kOk = 0;
constexpr int kValidationFindings = 1;
constexpr int kFatal = 2;
constexpr int kAgentFailures = 3;

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(',', start);
    std::string item = text.substr(start, end == std::string::npos ? end : end - start);
    if (!item.empty()) out.push_back(item);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

std::string template_path(const std::string& templates_dir, const std::string& config_name,
                          const std::string& language) {
  return templates_dir + "/" + config_name + "_" + language + ".txt";
}

// One source per configured language, skipping files that do not exist;
// validate_templates reports those as MISSING_TEMPLATE findings.
std::map<std::string, std::string> collect_template_sources(const GameConfig& config,
                                                            const std::string& templates_dir) {
  std::map<std::string, std::string> sources;
  for (const std::string& language : config.languages) {
    std::string path = template_path(templates_dir, config.name, language);
    if (file_exists(path)) sources[language] = read_file(path);
  }
  return sources;
}

void print_findings(const ValidationReport& report, std::ostream& out) {
  for (const Finding& finding : report.findings) {
    out << finding << "\n";
  }
  if (report.ok()) {
    out << "0 findings\n";
  } else {
    out << report.findings.size() << " finding(s)\n";
  }
}

// "config" (bare or with a +known/+unknown suffix) names the config's own
// matrix; resolve it to the config's variant id so artifacts carry a real
// name. Every base must resolve to a built-in preset or the config matrix.
std::vector<std::string> resolve_variants(const std::vector<std::string>& variants,
                                          const GameConfig& config) {
  std::vector<std::string> out;
  for (const std::string& variant : variants) {
    VariantSpec spec = parse_variant(variant);  // throws on a bad suffix
    std::string base = spec.base == "config" ? config.variant_id : spec.base;
    if (!builtin_preset(base) && base != config.variant_id) {
      throw std::invalid_argument("unknown variant \"" + variant + "\"; built-ins: " +
                                  [] {
                                    std::string ids;
                                    for (const std::string& id : builtin_preset_ids()) {
                                      if (!ids.empty()) ids += ", ";
                                      ids += id;
                                    }
                                    return ids;
                                  }() +
                                  "; the config matrix is \"config\"");
    }
    std::string resolved = base;
    if (spec.rounds_known.has_value()) {
      resolved += *spec.rounds_known ? "+known" : "+unknown";
    }
    out.push_back(resolved);
  }
  return out;
}

struct ValidatedInputs {
  GameConfig config;
  TemplateSet templates;
};

// Shared validate path: returns the typed inputs when clean, otherwise the
// exit code after printing the findings.
std::optional<ValidatedInputs> validate_inputs(const std::string& config_path,
                                               const std::string& templates_dir,
                                               std::ostream& out, int& exit_code) {
  GameConfig config = parse_config(read_file(config_path));
  ValidationReport report = validate_config(config);
  TemplateSet templates = load_templates(collect_template_sources(config, templates_dir));
  report.merge(validate_templates(templates, config));
  print_findings(report, out);
  if (!report.ok()) {
    exit_code = kValidationFindings;
    return std::nullopt;
  }
  exit_code = kOk;
  return ValidatedInputs{std::move(config), std::move(templates)};
}

int cmd_validate(const std::string& config_path, const std::string& templates_dir,
                 std::ostream& out) {
  int exit_code = kOk;
  validate_inputs(config_path, templates_dir, out, exit_code);
  return exit_code;
}

struct RunArgs {
  std::string config_path;
  std::string templates_dir;
  std::string profiles_path;
  std::string variants = "config";
  int repetitions = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
  int concurrency = 1;
  std::string mock_endpoint;
  bool resume = false;
  bool dedupe = true;
  int retry_budget = 3;
  bool write_replies = false;
};

int cmd_run(const RunArgs& args, std::ostream& out) {
  int exit_code = kOk;
  auto inputs = validate_inputs(args.config_path, args.templates_dir, out, exit_code);
  if (!inputs) return exit_code;

  ProfileRegistry registry(args.profiles_path.empty()
                               ? default_profiles()
                               : parse_profiles(read_file(args.profiles_path)));

  CampaignOptions options;
  options.variants = resolve_variants(split_csv(args.variants), inputs->config);
  if (options.variants.empty()) throw std::invalid_argument("no variants given");
  options.repetitions = args.repetitions;
  options.seed = args.seed;
  options.concurrency = args.concurrency;
  options.dedupe_mixed = args.dedupe;
  options.resume = args.resume;
  options.out_dir = args.out_dir;
  options.retry_budget = args.retry_budget;
  options.write_replies = args.write_replies;
  if (!args.mock_endpoint.empty()) options.mock_endpoint = args.mock_endpoint;

  CampaignResult result =
      run_campaign(inputs->config, inputs->templates, registry, options, &out);
  out << "games: " << result.manifest.games << " (" << result.newly_run << " run, "
      << result.resumed << " resumed), decisions: " << result.manifest.decisions
      << ", failures: " << result.manifest.failures << "\n";
  out << "wrote " << args.out_dir << "/histories.jsonl and " << args.out_dir
      << "/manifest.json\n";
  return result.manifest.failures > 0 ? kAgentFailures : kOk;
}

int cmd_analyze(const std::string& histories_arg, const std::string& out_dir,
                const std::string& group_by, const std::string& encoding_name,
                std::ostream& out) {
  std::string histories_path =
      histories_arg.empty() ? out_dir + "/histories.jsonl" : histories_arg;
  std::vector<GameHistory> histories = load_histories(histories_path);
  if (histories.empty()) {
    throw std::runtime_error("no histories in " + histories_path);
  }
  Encoding encoding = encoding_from_string(encoding_name);

  std::filesystem::create_directories(out_dir);
  std::vector<AggregateCell> cells =
      aggregate(extract_score_observations(histories), split_csv(group_by));
  write_file(out_dir + "/aggregates.csv", aggregates_to_csv(cells));

  std::vector<TrajectoryRow> rows = variant_trajectories(histories, encoding);
  write_file(out_dir + "/trajectories.csv", trajectories_to_csv(rows));

  out << "wrote " << out_dir << "/aggregates.csv (" << cells.size() << " rows) and " << out_dir
      << "/trajectories.csv (" << rows.size() << " rows)\n";
  return kOk;
}

int cmd_score(std::vector<std::string> history_paths, std::string out_path,
              const std::string& harsh_variant, const std::string& mild_variant,
              std::ostream& out) {
  // "--out <run dir>" scores that run in place: histories from the directory,
  // scorecard.json into it.
  if (std::filesystem::is_directory(out_path)) {
    if (history_paths.empty()) history_paths.push_back(out_path + "/histories.jsonl");
    out_path += "/scorecard.json";
  } else if (history_paths.empty()) {
    throw std::invalid_argument("pass --histories, or point --out at a run directory");
  }

  std::vector<std::string> model_order;
  std::map<std::string, std::vector<GameHistory>> by_model;
  for (const std::string& path : history_paths) {
    for (GameHistory& history : load_histories(path)) {
      const std::string& model = history.game.llm;
      if (by_model.find(model) == by_model.end()) model_order.push_back(model);
      by_model[model].push_back(std::move(history));
    }
  }
  if (model_order.empty()) throw std::runtime_error("no histories to score");

  MetricsOptions metrics_options;
  metrics_options.harsh_variant = harsh_variant;
  metrics_options.mild_variant = mild_variant;

  std::vector<std::pair<std::string, RawMetrics>> raw;
  for (const std::string& model : model_order) {
    raw.emplace_back(model, compute_model_metrics(by_model[model], metrics_options));
  }
  write_file(out_path, scorecard_to_json(build_scorecard(raw)));
  out << "wrote " << out_path << " (" << raw.size() << " model(s))\n";
  return kOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Config-driven repeated-game harness for scripted and LLM-backed agents"};
  app.name("gamelab");
  app.require_subcommand(1);

  std::string config_path, templates_dir;
  CLI::App* validate = app.add_subcommand("validate", "Check a config and its templates");
  validate->add_option("--config", config_path, "Config JSON file")->required();
  validate->add_option("--templates-dir", templates_dir, "Directory of <config>_<lang>.txt files")
      ->required();

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Execute a campaign and persist histories");
  run->add_option("--config", run_args.config_path, "Config JSON file")->required();
  run->add_option("--templates-dir", run_args.templates_dir,
                  "Directory of <config>_<lang>.txt files")
      ->required();
  run->add_option("--profiles", run_args.profiles_path,
                  "Model profiles JSON (defaults to the built-in set)");
  run->add_option("--variants", run_args.variants,
                  "Comma-separated variant ids, each <base>[+known|+unknown]; base is a "
                  "built-in matrix or \"config\"");
  run->add_option("--repetitions", run_args.repetitions, "Repetitions per setup")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", run_args.seed, "Campaign seed for stochastic scripted policies");
  run->add_option("--out", run_args.out_dir, "Output directory")->required();
  run->add_option("--concurrency", run_args.concurrency, "Games run in parallel")
      ->check(CLI::PositiveNumber);
  run->add_option("--mock-endpoint", run_args.mock_endpoint,
                  "Route every model profile to this base URL");
  run->add_flag("--resume", run_args.resume, "Continue an interrupted run in --out");
  run->add_option("--dedupe-mixed-personalities", run_args.dedupe,
                  "Collapse order-only personality permutations (default true)");
  run->add_option("--retry-budget", run_args.retry_budget,
                  "Reprompts allowed per decision after a malformed reply");
  run->add_flag("--write-replies", run_args.write_replies,
                "Also persist raw reply text to replies.jsonl");

  std::string analyze_histories, analyze_out;
  std::string group_by = "model,language,variant";
  std::string encoding = "action";
  CLI::App* analyze = app.add_subcommand("analyze", "Export aggregates and trajectories");
  analyze->add_option("--histories", analyze_histories,
                      "histories.jsonl from a run (default: <out>/histories.jsonl)");
  analyze->add_option("--out", analyze_out, "Output directory")->required();
  analyze->add_option("--group-by", group_by,
                      "Comma-separated dimensions: model, language, personalities, "
                      "agent_personality, rounds_known, disclosed, variant");
  analyze->add_option("--encoding", encoding, "Trajectory encoding: action or coordination");

  std::vector<std::string> score_histories;
  std::string score_out = "scorecard.json";
  std::string harsh_variant = "pd_harsh";
  std::string mild_variant = "pd_mild";
  CLI::App* score = app.add_subcommand("score", "Compute the normalized metric scorecard");
  score->add_option("--histories", score_histories,
                    "histories.jsonl files, one per model (default: <out>/histories.jsonl "
                    "when --out is a run directory)");
  score->add_option("--out", score_out, "Scorecard path, or a run directory to score in place");
  score->add_option("--harsh-variant", harsh_variant, "Base variant id of the harsh runs");
  score->add_option("--mild-variant", mild_variant, "Base variant id of the mild runs");

  std::vector<std::string> argv_storage;
  argv_storage.push_back("gamelab");
  for (const std::string& arg : args) argv_storage.push_back(arg);
  std::vector<const char*> argv;
  for (const std::string& arg : argv_storage) argv.push_back(arg.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kFatal;
  }

  try {
    if (*validate) return cmd_validate(config_path, templates_dir, out);
    if (*run) return cmd_run(run_args, out);
    if (*analyze) return cmd_analyze(analyze_histories, analyze_out, group_by, encoding, out);
    if (*score)
      return cmd_score(score_histories, score_out, harsh_variant, mild_variant, out);
    err << "usage error: no subcommand\n";  // unreachable: a subcommand is required
    return kFatal;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kValidationFindings;
  } catch (const TemplateError& e) {
    err << "template error: " << e.what() << "\n";
    return kValidationFindings;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFatal;
  }
}

}  // namespace gamelab
