#pragma once

// Self-contained brute-force references used to cross-check the real
// implementation. Deliberately written against no project header: moves are
// 0 (Option A / defect) and 1 (Option B / cooperate), payoffs are plain 2x2
// arrays, metrics are direct formula transcriptions.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Move = int;  // 0 = first option, 1 = second option
using Policy = std::function<Move(const std::vector<Move>& own, const std::vector<Move>& opp)>;

struct Payoff2x2 {
  // cell[i][j] = scores (player1, player2) when p1 plays i and p2 plays j
  double cell[2][2][2];
};

inline Payoff2x2 conventional_pd() {
  // penalties: AA=(6,6) AB=(0,10) BA=(10,0) BB=(2,2)
  return Payoff2x2{{{{6, 6}, {0, 10}}, {{10, 0}, {2, 2}}}};
}

inline std::pair<double, double> play(const Policy& p1, const Policy& p2, const Payoff2x2& m, int rounds) {
  std::vector<Move> h1, h2;
  double s1 = 0, s2 = 0;
  for (int r = 0; r < rounds; ++r) {
    Move a = p1(h1, h2);
    Move b = p2(h2, h1);
    s1 += m.cell[a][b][0];
    s2 += m.cell[a][b][1];
    h1.push_back(a);
    h2.push_back(b);
  }
  return {s1, s2};
}

inline Policy always(Move v) {
  return [v](const std::vector<Move>&, const std::vector<Move>&) { return v; };
}

inline Policy tit_for_tat() {
  return [](const std::vector<Move>&, const std::vector<Move>& opp) {
    return opp.empty() ? 1 : opp.back();
  };
}

inline Policy grim_trigger() {
  return [](const std::vector<Move>&, const std::vector<Move>& opp) {
    for (Move m : opp)
      if (m == 0) return 0;
    return 1;
  };
}

inline Policy alternator() {
  return [](const std::vector<Move>& own, const std::vector<Move>&) {
    return static_cast<Move>(own.size() % 2);
  };
}

// ---------------------------------------------------------------------------
// Metric references: literal transcriptions of the four scoring formulas.

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double pop_variance(const std::vector<double>& v) {
  double m = mean(v), s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

inline double internal_variability(const std::vector<double>& results) {
  return pop_variance(results);
}

// observations: (language, cell, value); cell identifies a (personality
// combo, rounds-known) pair. Mean over observations per language, population
// variance across languages, mean over cells.
struct LangCellValue {
  std::string language;
  std::string cell;
  double value;
};

inline double cross_language_inconsistency(const std::vector<LangCellValue>& obs) {
  std::set<std::string> cells;
  for (const auto& o : obs) cells.insert(o.cell);
  std::vector<double> per_cell;
  for (const auto& cell : cells) {
    std::map<std::string, std::vector<double>> by_lang;
    for (const auto& o : obs)
      if (o.cell == cell) by_lang[o.language].push_back(o.value);
    std::vector<double> lang_means;
    for (const auto& [lang, vals] : by_lang) lang_means.push_back(mean(vals));
    per_cell.push_back(pop_variance(lang_means));
  }
  return per_cell.empty() ? 0.0 : mean(per_cell);
}

inline double payoff_sensitivity(const std::vector<double>& harsh, const std::vector<double>& mild) {
  std::vector<double> diffs;
  for (size_t d = 0; d < harsh.size(); ++d) diffs.push_back(std::fabs(harsh[d] - mild[d]));
  return mean(diffs);
}

inline double round_variability(const std::vector<std::vector<double>>& per_variant_series) {
  std::vector<double> per_variant;
  for (const auto& series : per_variant_series) per_variant.push_back(pop_variance(series));
  return mean(per_variant);
}

}  // namespace oracle
