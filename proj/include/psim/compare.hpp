#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psim/dynamics.hpp"
#include "psim/scenario.hpp"

namespace psim {

struct CompareRow {
  std::uint64_t seed = 0;
  RunSummary a;
  RunSummary b;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  int gini_slope_a_higher = 0;      // seeds where a's Gini trend exceeds b's
  int episodes_a_more = 0;          // seeds where a saw more boom-bust episodes
  int psi_shift_a_lower = 0;        // seeds where a's PSI distribution is steadier
  double mean_gini_slope_a = 0.0;
  double mean_gini_slope_b = 0.0;
};

// runs both configs on every seed (seed field overridden per run) and tallies
// the per-seed differences; identical configs produce all-zero differences
CompareReport compare_regimes(const ScenarioConfig& a, const ScenarioConfig& b,
                              const std::vector<std::uint64_t>& seeds);

// report as CSV rows plus a JSON tally; written next to each other in out_dir
void write_compare_report(const CompareReport& report, const ScenarioConfig& a,
                          const ScenarioConfig& b, const std::string& out_dir);
std::string compare_csv(const CompareReport& report);
std::string compare_json(const CompareReport& report, const ScenarioConfig& a,
                         const ScenarioConfig& b);

}  // namespace psim
