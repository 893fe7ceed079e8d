// Python bindings for the main operations: config validation, campaign
// enumeration and execution, history access, analytics exports, and the raw
// metric primitives. Structured values cross the boundary as plain Python
// types (dicts, lists, strings); game histories stay in their JSON-line form.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gamelab/analytics.hpp"
#include "gamelab/campaign.hpp"
#include "gamelab/config.hpp"
#include "gamelab/engine.hpp"
#include "gamelab/gateway.hpp"
#include "gamelab/payoff.hpp"
#include "gamelab/persistence.hpp"
#include "gamelab/prompt.hpp"

namespace py = pybind11;
using namespace gamelab;

namespace {

py::list findings_to_py(const ValidationReport& report) {
  py::list out;
  for (const Finding& finding : report.findings) {
    py::dict d;
    d["code"] = finding.code;
    d["path"] = finding.path;
    d["message"] = finding.message;
    out.append(d);
  }
  return out;
}

PayoffMatrix preset_or_throw(const std::string& variant_id) {
  auto preset = builtin_preset(variant_id);
  if (!preset) {
    throw std::invalid_argument("unknown built-in variant \"" + variant_id + "\"");
  }
  return *preset;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Config-driven repeated-game harness for scripted and LLM-backed agents.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<TemplateError>(m, "TemplateError", PyExc_ValueError);

  m.def(
      "version", [] { return std::string(kToolVersion); },
      "Tool name and version string.");

  m.def(
      "validate",
      [](const std::string& config_json, const std::map<std::string, std::string>& templates) {
        GameConfig config = parse_config(config_json);
        ValidationReport report = validate_config(config);
        TemplateSet set = load_templates(templates);
        report.merge(validate_templates(set, config));
        return findings_to_py(report);
      },
      py::arg("config_json"), py::arg("templates"),
      "Validation findings ({code, path, message} dicts) for a config document "
      "and its language -> template-source map; an empty list means runnable.");

  m.def(
      "normalize_config",
      [](const std::string& config_json) { return serialize_config(parse_config(config_json)); },
      py::arg("config_json"),
      "Round-trips a config document through the typed representation, "
      "resolving defaults.");

  m.def(
      "builtin_variants", [] { return builtin_preset_ids(); },
      "Variant ids of the built-in payoff matrices.");

  m.def(
      "preset_payoff",
      [](const std::string& variant_id, const std::string& combination) {
        return compute_payoff(preset_or_throw(variant_id), combination);
      },
      py::arg("variant_id"), py::arg("combination"),
      "Per-player score tuple of one joint move (e.g. \"AB\") in a built-in matrix.");

  m.def(
      "dilemma_strength_gap",
      [](const std::string& variant_id) {
        return dilemma_strength_gap(preset_or_throw(variant_id));
      },
      py::arg("variant_id"),
      "Mutual-cooperation minus mutual-defection reward gap of a built-in "
      "penalty matrix.");

  m.def(
      "enumerate_setups",
      [](const std::string& config_json, const std::vector<std::string>& variants,
         int repetitions, bool dedupe_mixed) {
        GameConfig config = parse_config(config_json);
        std::vector<std::string> keys;
        for (const GameSetup& setup :
             enumerate_game_setups(config, variants, repetitions, dedupe_mixed)) {
          keys.push_back(setup.key());
        }
        return keys;
      },
      py::arg("config_json"), py::arg("variants") = std::vector<std::string>{"config"},
      py::arg("repetitions") = 1, py::arg("dedupe_mixed") = true,
      "Setup keys of the full campaign enumeration, in execution order.");

  m.def(
      "run_campaign",
      [](const std::string& config_json, const std::map<std::string, std::string>& templates,
         const std::string& out_dir, const std::vector<std::string>& variants, int repetitions,
         std::uint64_t seed, int concurrency, bool dedupe_mixed, bool resume, int retry_budget,
         const std::string& profiles_json, const std::string& mock_endpoint, bool write_replies) {
        GameConfig config = parse_config(config_json);
        TemplateSet set = load_templates(templates, config.languages);
        ProfileRegistry registry(profiles_json.empty() ? default_profiles()
                                                       : parse_profiles(profiles_json));
        CampaignOptions options;
        options.variants = variants;
        options.repetitions = repetitions;
        options.seed = seed;
        options.concurrency = concurrency;
        options.dedupe_mixed = dedupe_mixed;
        options.resume = resume;
        options.out_dir = out_dir;
        options.retry_budget = retry_budget;
        options.write_replies = write_replies;
        if (!mock_endpoint.empty()) options.mock_endpoint = mock_endpoint;

        CampaignResult result;
        {
          py::gil_scoped_release release;  // campaigns run worker threads
          result = run_campaign(config, set, registry, options);
        }
        py::dict out;
        out["games"] = result.manifest.games;
        out["decisions"] = result.manifest.decisions;
        out["failures"] = result.manifest.failures;
        out["newly_run"] = result.newly_run;
        out["resumed"] = result.resumed;
        out["histories_path"] = out_dir + "/histories.jsonl";
        out["manifest_path"] = out_dir + "/manifest.json";
        return out;
      },
      py::arg("config_json"), py::arg("templates"), py::arg("out_dir"),
      py::arg("variants") = std::vector<std::string>{"config"}, py::arg("repetitions") = 1,
      py::arg("seed") = 0, py::arg("concurrency") = 1, py::arg("dedupe_mixed") = true,
      py::arg("resume") = false, py::arg("retry_budget") = 3, py::arg("profiles_json") = "",
      py::arg("mock_endpoint") = "", py::arg("write_replies") = false,
      "Enumerates, executes, and persists a campaign; returns the run summary "
      "with the paths of the artifacts it wrote.");

  m.def(
      "load_histories",
      [](const std::string& path) { return read_complete_lines(path); },
      py::arg("path"),
      "Raw JSON lines of a histories file, each json.loads-able on its own.");

  m.def(
      "aggregates_csv",
      [](const std::string& histories_path, const std::vector<std::string>& group_by) {
        std::vector<GameHistory> histories = load_histories(histories_path);
        return aggregates_to_csv(aggregate(extract_score_observations(histories), group_by));
      },
      py::arg("histories_path"),
      py::arg("group_by") = std::vector<std::string>{"model", "language", "variant"},
      "Final-score aggregate table (n, mean, 95% CI) grouped by the named "
      "dimensions, as CSV text.");

  m.def(
      "trajectories_csv",
      [](const std::string& histories_path, const std::string& encoding) {
        std::vector<GameHistory> histories = load_histories(histories_path);
        return trajectories_to_csv(
            variant_trajectories(histories, encoding_from_string(encoding)));
      },
      py::arg("histories_path"), py::arg("encoding") = "action",
      "Per-variant average encoded round series, as CSV text.");

  m.def(
      "scorecard_json",
      [](const std::vector<std::string>& histories_paths, const std::string& harsh_variant,
         const std::string& mild_variant) {
        std::vector<std::string> model_order;
        std::map<std::string, std::vector<GameHistory>> by_model;
        for (const std::string& path : histories_paths) {
          for (GameHistory& history : load_histories(path)) {
            const std::string& model = history.game.llm;
            if (by_model.find(model) == by_model.end()) model_order.push_back(model);
            by_model[model].push_back(std::move(history));
          }
        }
        if (model_order.empty()) throw std::runtime_error("no histories to score");

        MetricsOptions options;
        options.harsh_variant = harsh_variant;
        options.mild_variant = mild_variant;
        std::vector<std::pair<std::string, RawMetrics>> raw;
        for (const std::string& model : model_order) {
          raw.emplace_back(model, compute_model_metrics(by_model[model], options));
        }
        return scorecard_to_json(build_scorecard(raw));
      },
      py::arg("histories_paths"), py::arg("harsh_variant") = "pd_harsh",
      py::arg("mild_variant") = "pd_mild",
      "Raw and max-normalized four-metric scorecard across the given runs, "
      "one model per distinct llm reference, as JSON text.");

  m.def("internal_variability", &metric_internal_variability, py::arg("final_scores"),
        "Population variance of one model's final scores.");

  m.def(
      "cross_language_inconsistency",
      [](const std::vector<std::tuple<std::string, std::string, double>>& observations) {
        std::vector<LanguageCellValue> typed;
        typed.reserve(observations.size());
        for (const auto& [language, cell, value] : observations) {
          typed.push_back({language, cell, value});
        }
        return metric_cross_language_inconsistency(typed);
      },
      py::arg("observations"),
      "Mean over cells of the across-language variance of per-language means; "
      "observations are (language, cell, value) triples.");

  m.def("payoff_sensitivity", &metric_payoff_sensitivity, py::arg("harsh_series"),
        py::arg("mild_series"),
        "Mean absolute per-round gap between the harsh and mild mean-action series.");

  m.def("round_variability", &metric_round_variability, py::arg("per_variant_series"),
        "Mean over variants of the across-round variance of each series.");
}
