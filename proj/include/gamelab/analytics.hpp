#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gamelab/engine.hpp"

namespace gamelab {

// Per-round ±1 codings: action marks what was chosen (first strategy -> +1),
// coordination marks whether the pair matched (mismatch -> +1).
enum class Encoding { action, coordination };

std::string to_string(Encoding encoding);
Encoding encoding_from_string(const std::string& s);

struct EncodedRun {
  std::string game_id;  // setup key
  std::string variant;  // base variant id
  Encoding encoding = Encoding::action;
  std::vector<double> values;  // one per played round
};

// One agent's outcome in one game, with every grouping dimension the
// reporting layer can slice by.
struct ScoreObservation {
  std::string model;
  std::string language;
  std::string personalities;      // assignment combo, e.g. "cooperative+selfish"
  std::string agent_personality;  // this agent's personality id
  bool rounds_known = true;
  bool disclosed = false;  // this agent was told its opponent's personality
  std::string variant;     // as enumerated
  std::string base_variant;
  int repetition = 0;
  double final_score = 0.0;
};

std::vector<ScoreObservation> extract_score_observations(
    const std::vector<GameHistory>& histories);

struct AggregateCell {
  // Grouping key; "*" marks a dimension the caller did not group by.
  std::string model = "*";
  std::string language = "*";
  std::string personalities = "*";
  std::string agent_personality = "*";
  std::string rounds_known = "*";
  std::string disclosed = "*";
  std::string variant = "*";
  size_t n = 0;
  double mean = 0.0;
  double ci95 = 0.0;  // 1.96 * s / sqrt(n), sample standard deviation
};

const std::vector<std::string>& aggregate_dimensions();

// Groups observations by the named dimensions and computes mean final score
// with its normal-approximation 95% confidence half-width per cell. Cells
// come back sorted by key. Throws std::invalid_argument on an unknown
// dimension name.
std::vector<AggregateCell> aggregate(const std::vector<ScoreObservation>& observations,
                                     const std::vector<std::string>& group_by);

// Action encoding yields one run per agent per game; coordination encoding
// one run per game.
std::vector<EncodedRun> encode_runs(const std::vector<GameHistory>& histories,
                                    Encoding encoding);

// Per-round arithmetic mean across runs. Throws std::invalid_argument when
// run lengths differ (stop conditions; callers filter first).
std::vector<double> average_trajectory(const std::vector<EncodedRun>& runs);

// Keeps only runs whose length equals the most common length (ties go to the
// longer length).
std::vector<EncodedRun> filter_modal_length(const std::vector<EncodedRun>& runs);

// --- raw bias/consistency metrics (population variance throughout) ---

// Variance of the full final-score set of one model.
double metric_internal_variability(const std::vector<double>& final_scores);

struct LanguageCellValue {
  std::string language;  // axis the variance runs across
  std::string cell;      // personality-combo x rounds-known cell key
  double value;          // one observation
};

// Mean over cells of the across-language variance of per-language means.
double metric_cross_language_inconsistency(const std::vector<LanguageCellValue>& observations);

// Mean absolute per-round gap between the harsh and mild mean-action series.
double metric_payoff_sensitivity(const std::vector<double>& harsh_series,
                                 const std::vector<double>& mild_series);

// Mean over variants of the across-round variance of each per-round series.
double metric_round_variability(const std::vector<std::vector<double>>& per_variant_series);

struct RawMetrics {
  double internal_variability = 0.0;
  double cross_language_inconsistency = 0.0;
  std::optional<double> payoff_sensitivity;  // absent without harsh+mild data
  double round_variability = 0.0;
};

struct MetricsOptions {
  std::string harsh_variant = "pd_harsh";  // base variant id of the harsh runs
  std::string mild_variant = "pd_mild";
};

// All four raw metrics for one model's histories. payoff_sensitivity is set
// only when both configured variants appear in the data.
RawMetrics compute_model_metrics(const std::vector<GameHistory>& histories,
                                 const MetricsOptions& options = {});

struct ScorecardEntry {
  std::string model;
  RawMetrics raw;
  RawMetrics normalized;
};

struct Scorecard {
  std::vector<ScorecardEntry> models;
};

// Divides each metric by its maximum across the compared models; an all-zero
// metric normalizes to zero everywhere.
Scorecard build_scorecard(const std::vector<std::pair<std::string, RawMetrics>>& raw_by_model);

// --- exports (numbers carry 17 significant digits) ---

struct TrajectoryRow {
  std::string variant;  // base variant id
  int round = 1;
  double mean_encoded = 0.0;
};

// One averaged series per base variant, modal-length filtered per variant.
std::vector<TrajectoryRow> variant_trajectories(const std::vector<GameHistory>& histories,
                                                Encoding encoding);

std::string aggregates_to_csv(const std::vector<AggregateCell>& cells);
std::string trajectories_to_csv(const std::vector<TrajectoryRow>& rows);
std::string scorecard_to_json(const Scorecard& scorecard);

}  // namespace gamelab
