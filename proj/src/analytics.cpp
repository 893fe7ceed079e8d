#include "gamelab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

namespace gamelab {

namespace {

std::string g17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

double population_variance(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double m = mean_of(values);
  double sum = 0.0;
  for (double v : values) sum += (v - m) * (v - m);
  return sum / static_cast<double>(values.size());
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string to_string(Encoding encoding) {
  return encoding == Encoding::action ? "action" : "coordination";
}

Encoding encoding_from_string(const std::string& s) {
  if (s == "action") return Encoding::action;
  if (s == "coordination") return Encoding::coordination;
  throw std::invalid_argument("unknown encoding \"" + s + "\"");
}

std::vector<ScoreObservation> extract_score_observations(
    const std::vector<GameHistory>& histories) {
  std::vector<ScoreObservation> out;
  for (const GameHistory& history : histories) {
    const GameDescriptor& game = history.game;
    std::vector<double> totals = final_scores(history);

    std::string combo;
    for (const AgentInfo& agent : game.agents) {
      if (!combo.empty()) combo += "+";
      combo += agent.personality_id;
    }

    for (size_t i = 0; i < game.agents.size(); ++i) {
      ScoreObservation obs;
      obs.model = game.llm;
      obs.language = game.language;
      obs.personalities = combo;
      obs.agent_personality = game.agents[i].personality_id;
      obs.rounds_known = game.rounds_known;
      size_t opponent = game.agents.size() - 1 - i;
      obs.disclosed = game.agents[opponent].disclosure_prob > 0.0 &&
                      game.agents[opponent].personality_id != "none";
      obs.variant = game.variant_id;
      obs.base_variant = base_variant(game.variant_id);
      obs.repetition = game.repetition;
      obs.final_score = i < totals.size() ? totals[i] : 0.0;
      out.push_back(std::move(obs));
    }
  }
  return out;
}

const std::vector<std::string>& aggregate_dimensions() {
  static const std::vector<std::string> dims = {
      "model",        "language", "personalities", "agent_personality",
      "rounds_known", "disclosed", "variant"};
  return dims;
}

std::vector<AggregateCell> aggregate(const std::vector<ScoreObservation>& observations,
                                     const std::vector<std::string>& group_by) {
  for (const std::string& dim : group_by) {
    const auto& dims = aggregate_dimensions();
    if (std::find(dims.begin(), dims.end(), dim) == dims.end()) {
      throw std::invalid_argument("unknown grouping dimension \"" + dim + "\"");
    }
  }
  auto grouped = [&](const std::string& dim) {
    return std::find(group_by.begin(), group_by.end(), dim) != group_by.end();
  };

  using Key = std::vector<std::string>;
  std::map<Key, std::vector<double>> groups;
  for (const ScoreObservation& obs : observations) {
    Key key = {
        grouped("model") ? obs.model : "*",
        grouped("language") ? obs.language : "*",
        grouped("personalities") ? obs.personalities : "*",
        grouped("agent_personality") ? obs.agent_personality : "*",
        grouped("rounds_known") ? bool_text(obs.rounds_known) : "*",
        grouped("disclosed") ? bool_text(obs.disclosed) : "*",
        grouped("variant") ? obs.variant : "*",
    };
    groups[key].push_back(obs.final_score);
  }

  std::vector<AggregateCell> cells;
  for (const auto& [key, scores] : groups) {
    AggregateCell cell;
    cell.model = key[0];
    cell.language = key[1];
    cell.personalities = key[2];
    cell.agent_personality = key[3];
    cell.rounds_known = key[4];
    cell.disclosed = key[5];
    cell.variant = key[6];
    cell.n = scores.size();
    cell.mean = mean_of(scores);
    if (scores.size() >= 2) {
      double m = cell.mean;
      double sum = 0.0;
      for (double v : scores) sum += (v - m) * (v - m);
      double sample_sd = std::sqrt(sum / static_cast<double>(scores.size() - 1));
      cell.ci95 = 1.96 * sample_sd / std::sqrt(static_cast<double>(scores.size()));
    }
    cells.push_back(std::move(cell));
  }
  return cells;  // std::map iteration already sorted by key
}

std::vector<EncodedRun> encode_runs(const std::vector<GameHistory>& histories,
                                    Encoding encoding) {
  std::vector<EncodedRun> runs;
  for (const GameHistory& history : histories) {
    const GameDescriptor& game = history.game;
    if (encoding == Encoding::action) {
      for (size_t i = 0; i < game.agents.size(); ++i) {
        EncodedRun run;
        run.game_id = game.setup_key + "#" + game.agents[i].name;
        run.variant = base_variant(game.variant_id);
        run.encoding = encoding;
        for (const RoundRecord& record : history.records) {
          run.values.push_back(record.strategies[i] == 0 ? 1.0 : -1.0);
        }
        runs.push_back(std::move(run));
      }
    } else {
      EncodedRun run;
      run.game_id = game.setup_key;
      run.variant = base_variant(game.variant_id);
      run.encoding = encoding;
      for (const RoundRecord& record : history.records) {
        bool matched = record.strategies.size() >= 2 &&
                       record.strategies[0] == record.strategies[1];
        run.values.push_back(matched ? -1.0 : 1.0);
      }
      runs.push_back(std::move(run));
    }
  }
  return runs;
}

std::vector<double> average_trajectory(const std::vector<EncodedRun>& runs) {
  if (runs.empty()) return {};
  size_t length = runs.front().values.size();
  for (const EncodedRun& run : runs) {
    if (run.values.size() != length) {
      throw std::invalid_argument("trajectory runs have mixed lengths; filter first");
    }
  }
  std::vector<double> out(length, 0.0);
  for (const EncodedRun& run : runs) {
    for (size_t i = 0; i < length; ++i) out[i] += run.values[i];
  }
  for (double& v : out) v /= static_cast<double>(runs.size());
  return out;
}

std::vector<EncodedRun> filter_modal_length(const std::vector<EncodedRun>& runs) {
  if (runs.empty()) return {};
  std::map<size_t, size_t> counts;
  for (const EncodedRun& run : runs) ++counts[run.values.size()];
  size_t best_length = 0;
  size_t best_count = 0;
  for (const auto& [length, count] : counts) {
    if (count > best_count || (count == best_count && length > best_length)) {
      best_length = length;
      best_count = count;
    }
  }
  std::vector<EncodedRun> out;
  for (const EncodedRun& run : runs) {
    if (run.values.size() == best_length) out.push_back(run);
  }
  return out;
}

double metric_internal_variability(const std::vector<double>& final_scores) {
  return population_variance(final_scores);
}

double metric_cross_language_inconsistency(
    const std::vector<LanguageCellValue>& observations) {
  // cell -> language -> values
  std::map<std::string, std::map<std::string, std::vector<double>>> cells;
  for (const LanguageCellValue& obs : observations) {
    cells[obs.cell][obs.language].push_back(obs.value);
  }
  if (cells.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [cell, by_language] : cells) {
    std::vector<double> language_means;
    for (const auto& [language, values] : by_language) {
      language_means.push_back(mean_of(values));
    }
    total += population_variance(language_means);
  }
  return total / static_cast<double>(cells.size());
}

double metric_payoff_sensitivity(const std::vector<double>& harsh_series,
                                 const std::vector<double>& mild_series) {
  if (harsh_series.size() != mild_series.size()) {
    throw std::invalid_argument("harsh and mild series must cover the same rounds");
  }
  if (harsh_series.empty()) return 0.0;
  double total = 0.0;
  for (size_t i = 0; i < harsh_series.size(); ++i) {
    total += std::abs(harsh_series[i] - mild_series[i]);
  }
  return total / static_cast<double>(harsh_series.size());
}

double metric_round_variability(const std::vector<std::vector<double>>& per_variant_series) {
  if (per_variant_series.empty()) return 0.0;
  double total = 0.0;
  for (const std::vector<double>& series : per_variant_series) {
    total += population_variance(series);
  }
  return total / static_cast<double>(per_variant_series.size());
}

RawMetrics compute_model_metrics(const std::vector<GameHistory>& histories,
                                 const MetricsOptions& options) {
  RawMetrics metrics;

  std::vector<ScoreObservation> observations = extract_score_observations(histories);
  std::vector<double> scores;
  scores.reserve(observations.size());
  for (const ScoreObservation& obs : observations) scores.push_back(obs.final_score);
  metrics.internal_variability = metric_internal_variability(scores);

  std::vector<LanguageCellValue> by_cell;
  by_cell.reserve(observations.size());
  for (const ScoreObservation& obs : observations) {
    by_cell.push_back({obs.language,
                       obs.personalities + "|" + bool_text(obs.rounds_known),
                       obs.final_score});
  }
  metrics.cross_language_inconsistency = metric_cross_language_inconsistency(by_cell);

  // Per-variant mean-action series, each variant filtered to its modal length.
  std::map<std::string, std::vector<EncodedRun>> runs_by_variant;
  for (EncodedRun& run : encode_runs(histories, Encoding::action)) {
    runs_by_variant[run.variant].push_back(std::move(run));
  }
  std::map<std::string, std::vector<double>> series_by_variant;
  for (const auto& [variant, runs] : runs_by_variant) {
    series_by_variant[variant] = average_trajectory(filter_modal_length(runs));
  }

  auto harsh = series_by_variant.find(options.harsh_variant);
  auto mild = series_by_variant.find(options.mild_variant);
  if (harsh != series_by_variant.end() && mild != series_by_variant.end()) {
    size_t rounds = std::min(harsh->second.size(), mild->second.size());
    std::vector<double> h(harsh->second.begin(), harsh->second.begin() + rounds);
    std::vector<double> m(mild->second.begin(), mild->second.begin() + rounds);
    metrics.payoff_sensitivity = metric_payoff_sensitivity(h, m);
  }

  std::vector<std::vector<double>> all_series;
  for (const auto& [variant, series] : series_by_variant) all_series.push_back(series);
  metrics.round_variability = metric_round_variability(all_series);

  return metrics;
}

Scorecard build_scorecard(const std::vector<std::pair<std::string, RawMetrics>>& raw_by_model) {
  double max_iv = 0.0, max_ci = 0.0, max_sp = 0.0, max_vr = 0.0;
  for (const auto& [model, raw] : raw_by_model) {
    max_iv = std::max(max_iv, raw.internal_variability);
    max_ci = std::max(max_ci, raw.cross_language_inconsistency);
    if (raw.payoff_sensitivity) max_sp = std::max(max_sp, *raw.payoff_sensitivity);
    max_vr = std::max(max_vr, raw.round_variability);
  }
  auto normalize = [](double value, double max_value) {
    return max_value > 0.0 ? value / max_value : 0.0;
  };

  Scorecard card;
  for (const auto& [model, raw] : raw_by_model) {
    ScorecardEntry entry;
    entry.model = model;
    entry.raw = raw;
    entry.normalized.internal_variability = normalize(raw.internal_variability, max_iv);
    entry.normalized.cross_language_inconsistency =
        normalize(raw.cross_language_inconsistency, max_ci);
    if (raw.payoff_sensitivity) {
      entry.normalized.payoff_sensitivity = normalize(*raw.payoff_sensitivity, max_sp);
    }
    entry.normalized.round_variability = normalize(raw.round_variability, max_vr);
    card.models.push_back(std::move(entry));
  }
  return card;
}

std::vector<TrajectoryRow> variant_trajectories(const std::vector<GameHistory>& histories,
                                                Encoding encoding) {
  std::map<std::string, std::vector<EncodedRun>> runs_by_variant;
  for (EncodedRun& run : encode_runs(histories, encoding)) {
    runs_by_variant[run.variant].push_back(std::move(run));
  }
  std::vector<TrajectoryRow> rows;
  for (const auto& [variant, runs] : runs_by_variant) {
    std::vector<double> series = average_trajectory(filter_modal_length(runs));
    for (size_t i = 0; i < series.size(); ++i) {
      rows.push_back({variant, static_cast<int>(i) + 1, series[i]});
    }
  }
  return rows;
}

std::string aggregates_to_csv(const std::vector<AggregateCell>& cells) {
  std::string out =
      "model,language,personalities,agent_personality,rounds_known,disclosed,variant,n,mean,"
      "ci95\n";
  for (const AggregateCell& cell : cells) {
    out += csv_field(cell.model) + "," + csv_field(cell.language) + "," +
           csv_field(cell.personalities) + "," + csv_field(cell.agent_personality) + "," +
           cell.rounds_known + "," + cell.disclosed + "," + csv_field(cell.variant) + "," +
           std::to_string(cell.n) + "," + g17(cell.mean) + "," + g17(cell.ci95) + "\n";
  }
  return out;
}

std::string trajectories_to_csv(const std::vector<TrajectoryRow>& rows) {
  std::string out = "variant,round,mean_encoded\n";
  for (const TrajectoryRow& row : rows) {
    out += csv_field(row.variant) + "," + std::to_string(row.round) + "," +
           g17(row.mean_encoded) + "\n";
  }
  return out;
}

std::string scorecard_to_json(const Scorecard& scorecard) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') {
        out += '\\';
        out += c;
      } else {
        out += c;
      }
    }
    out += "\"";
    return out;
  };
  auto metrics_json = [&](const RawMetrics& m) {
    std::string out = "{";
    out += "\"internal_variability\": " + g17(m.internal_variability) + ", ";
    out += "\"cross_language_inconsistency\": " + g17(m.cross_language_inconsistency) + ", ";
    if (m.payoff_sensitivity) {
      out += "\"payoff_sensitivity\": " + g17(*m.payoff_sensitivity) + ", ";
    }
    out += "\"round_variability\": " + g17(m.round_variability);
    out += "}";
    return out;
  };

  std::string out = "{\n  \"models\": [\n";
  for (size_t i = 0; i < scorecard.models.size(); ++i) {
    const ScorecardEntry& entry = scorecard.models[i];
    out += "    {\"model\": " + quote(entry.model) + ", \"raw\": " + metrics_json(entry.raw) +
           ", \"normalized\": " + metrics_json(entry.normalized) + "}";
    if (i + 1 < scorecard.models.size()) out += ",";
    out += "\n";
  }
  out += "  ]\n}\n";
  return out;
}

}  // namespace gamelab
