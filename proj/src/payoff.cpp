#include "gamelab/payoff.hpp"

#include <stdexcept>

namespace gamelab {

std::string combination_label(const PayoffMatrix& matrix, const std::vector<size_t>& indices) {
  std::string label;
  for (size_t idx : indices) label += matrix.strategy_ids.at(idx);
  return label;
}

const std::vector<double>& compute_payoff(const PayoffMatrix& matrix,
                                          const std::string& combination) {
  if (const auto* tuple = matrix.table.find(combination)) return *tuple;
  throw std::out_of_range("compute_payoff: unknown combination '" + combination + "'");
}

PayoffMatrix resolve_payoff_matrix(const GameConfig& config) {
  PayoffMatrix out;
  out.strategy_ids = config.strategy_ids();
  out.orientation = config.payoff_matrix.orientation;
  for (const auto& combo : config.payoff_matrix.combinations) {
    const auto* weight_ids = config.payoff_matrix.matrix.find(combo);
    if (!weight_ids)
      throw std::invalid_argument("payoff matrix has no tuple for combination '" + combo + "'");
    std::vector<double> tuple;
    tuple.reserve(weight_ids->size());
    for (const auto& wid : *weight_ids) tuple.push_back(config.payoff_matrix.weights.at(wid));
    out.table.set(combo, std::move(tuple));
  }
  return out;
}

namespace {

PayoffMatrix make_2x2(Orientation orientation, double aa1, double aa2, double ab1, double ab2,
                      double ba1, double ba2, double bb1, double bb2) {
  PayoffMatrix m;
  m.strategy_ids = {"A", "B"};
  m.orientation = orientation;
  m.table.set("AA", {aa1, aa2});
  m.table.set("AB", {ab1, ab2});
  m.table.set("BA", {ba1, ba2});
  m.table.set("BB", {bb1, bb2});
  return m;
}

}  // namespace

const std::vector<std::string>& builtin_preset_ids() {
  static const std::vector<std::string> ids = {"pd_conventional", "pd_harsh", "pd_mild",
                                               "battle_of_sexes"};
  return ids;
}

std::optional<PayoffMatrix> builtin_preset(const std::string& id) {
  using O = Orientation;
  if (id == "pd_conventional") return make_2x2(O::penalty, 6, 6, 0, 10, 10, 0, 2, 2);
  if (id == "pd_harsh") return make_2x2(O::penalty, 8, 8, 0, 10, 10, 0, 5, 5);
  if (id == "pd_mild") return make_2x2(O::penalty, 8, 8, 0, 10, 10, 0, 2, 2);
  if (id == "battle_of_sexes") return make_2x2(O::reward, 10, 7, 0, 0, 0, 0, 7, 10);
  return std::nullopt;
}

double dilemma_strength_gap(const PayoffMatrix& matrix) {
  if (matrix.strategy_ids.size() != 2 || matrix.players() != 2)
    throw std::invalid_argument("dilemma_strength_gap: requires a 2-strategy 2-player matrix");
  if (matrix.orientation != Orientation::penalty)
    throw std::invalid_argument("dilemma_strength_gap: requires penalty orientation");
  const auto& defect = matrix.strategy_ids[0];
  const auto& coop = matrix.strategy_ids[1];
  double mutual_punishment = -compute_payoff(matrix, defect + defect)[0];
  double mutual_reward = -compute_payoff(matrix, coop + coop)[0];
  return mutual_reward - mutual_punishment;
}

}  // namespace gamelab
