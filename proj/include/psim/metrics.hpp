#pragma once

#include <array>
#include <span>
#include <vector>

#include "psim/instruments.hpp"
#include "psim/types.hpp"

namespace psim {

struct MetricsFrame {
  Tick tick = 0;
  double gini = 0.0;
  std::array<double, kGroupCount> price_index{1.0, 1.0, 1.0, 1.0};
  std::array<double, kGroupCount> velocity{0.0, 0.0, 0.0, 0.0};
  double real_savings = 0.0;
  double perceived_real_ratio = 0.0;
  double distribution_shift = 0.0;  // L1 vs the previous frame's PSI holdings
  double aggregate_consumption = 0.0;
  std::array<Count, kGroupCount> outstanding{0, 0, 0, 0};
  std::vector<double> psi_distribution;  // normalized per agent when outstanding > 0
};

// population Gini: mean absolute difference / (2 x mean); non-negative input,
// at least one positive value
double gini(std::span<const double> values);

// least-squares slope of y on x; x must not be constant
double ols_slope(std::span<const double> x, std::span<const double> y);

// slope of purchasing-power deltas on access rank (0 = first access)
double cantillon_gradient(std::span<const double> access_ranks, std::span<const double> deltas);

// Laspeyres: sum(q x p_now) / sum(q x p_base); the base dot product must be
// positive
double price_index(std::span<const double> basket_qty, std::span<const double> prices_now,
                   std::span<const double> prices_base);

// transfer value over [window_start, window_end] divided by the average
// outstanding value per tick of the group; requires a retained event log
double velocity(const Ledger& ledger, Group g, Tick window_start, Tick window_end);

// L1 distance between the two holdings vectors after normalizing each to sum
// 1 (an all-zero vector stays all-zero); range [0, 2]
double distribution_shift(std::span<const double> holdings_a, std::span<const double> holdings_b);

struct Episode {
  std::size_t start = 0;   // first index of the boom run
  std::size_t peak = 0;    // max value index inside the boom run
  std::size_t trough = 0;  // min value index inside the bust run
};

// boom = min_run consecutive points above mean + k x sd of the baseline
// window, bust = min_run consecutive points below mean - k x sd within
// respond_window after the boom ends; episodes never overlap
std::vector<Episode> detect_boom_bust(std::span<const double> series,
                                      std::size_t baseline_window, double k,
                                      std::size_t respond_window = 600,
                                      std::size_t min_run = 3);

}  // namespace psim
