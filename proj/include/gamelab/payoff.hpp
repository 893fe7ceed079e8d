#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gamelab/config.hpp"
#include "gamelab/ordered_dict.hpp"

namespace gamelab {

// Resolved payoff matrix: combination label -> per-player score tuple.
// Scores keep the sign they carry in the config; orientation says whether
// they are penalties (minimize) or rewards (maximize).
struct PayoffMatrix {
  std::vector<std::string> strategy_ids;
  Orientation orientation = Orientation::penalty;
  OrderedDict<std::vector<double>> table;

  size_t players() const { return table.empty() ? 0 : table.begin()->second.size(); }

  friend bool operator==(const PayoffMatrix&, const PayoffMatrix&) = default;
};

// Builds the label for a joint move, player order ("AB" = p1 A, p2 B).
std::string combination_label(const PayoffMatrix& matrix, const std::vector<size_t>& indices);

// Pure lookup of the stored tuple. Throws std::out_of_range on an unknown
// combination; unreachable once the config validated.
const std::vector<double>& compute_payoff(const PayoffMatrix& matrix,
                                          const std::string& combination);

// Resolves a declarative spec (weight ids -> numbers) using the canonical
// strategy-id order of the given config.
PayoffMatrix resolve_payoff_matrix(const GameConfig& config);

// Built-in matrices, exposed under these variant ids.
//   pd_conventional, pd_harsh, pd_mild : penalties, strategies A (defect) / B (cooperate)
//   battle_of_sexes                    : rewards
const std::vector<std::string>& builtin_preset_ids();
std::optional<PayoffMatrix> builtin_preset(const std::string& id);

// Mutual-cooperation minus mutual-defection reward gap for a 2x2 penalty
// matrix (first strategy = defect). Throws std::invalid_argument on any other
// shape or orientation.
double dilemma_strength_gap(const PayoffMatrix& matrix);

}  // namespace gamelab
