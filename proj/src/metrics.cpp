#include "psim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace psim {

double gini(std::span<const double> values) {
  if (values.empty()) fail(Err::AllZero, "empty population");
  double total = 0.0;
  for (double v : values) {
    if (v < 0.0) fail(Err::RangeViolation, "negative value in gini input");
    total += v;
  }
  if (total <= 0.0) fail(Err::AllZero, "all values zero");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double n = static_cast<double>(sorted.size());
  double weighted = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    weighted += static_cast<double>(i + 1) * sorted[i];
  return (2.0 * weighted - (n + 1.0) * total) / (n * total);
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(Err::MismatchedAgents, "x and y differ in length");
  if (x.size() < 2) fail(Err::DegenerateInput, "need at least two points");
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    sxx += dx * dx;
    sxy += dx * (y[i] - my);
  }
  if (sxx <= 0.0) fail(Err::DegenerateInput, "regressor is constant");
  return sxy / sxx;
}

double cantillon_gradient(std::span<const double> access_ranks, std::span<const double> deltas) {
  return ols_slope(access_ranks, deltas);
}

double price_index(std::span<const double> basket_qty, std::span<const double> prices_now,
                   std::span<const double> prices_base) {
  if (basket_qty.size() != prices_now.size() || basket_qty.size() != prices_base.size())
    fail(Err::DegenerateInput, "basket and price vectors differ in length");
  double now = 0.0, base = 0.0;
  for (std::size_t i = 0; i < basket_qty.size(); ++i) {
    now += basket_qty[i] * prices_now[i];
    base += basket_qty[i] * prices_base[i];
  }
  if (base <= 0.0) fail(Err::MissingBase, "base-period basket value is zero");
  return now / base;
}

double velocity(const Ledger& ledger, Group g, Tick window_start, Tick window_end) {
  if (window_end < window_start) fail(Err::RangeViolation, "window ends before it starts");
  const auto& events = ledger.events();
  double running = 0.0;      // outstanding value of the group, replayed
  double transferred = 0.0;  // transfer value inside the window
  double outstanding_sum = 0.0;
  Tick cursor = window_start;
  std::size_t i = 0;
  auto flush_until = [&](Tick t) {
    while (cursor < t && cursor <= window_end) {
      outstanding_sum += running;
      ++cursor;
    }
  };
  for (; i < events.size(); ++i) {
    const LedgerEvent& ev = events[i];
    if (ev.tick > window_end && cursor > window_end) break;
    flush_until(ev.tick);
    const InstrumentClass& c = ledger.instrument(ev.cls);
    if (group_of(c.kind) != g) continue;
    double value = static_cast<double>(ev.amount * c.denomination);
    if (ev.kind == EventKind::Issue && ev.tick <= window_end) running += value;
    if (ev.kind == EventKind::Destroy && ev.tick <= window_end) running -= value;
    if (ev.kind == EventKind::Transfer && ev.tick >= window_start && ev.tick <= window_end)
      transferred += value;
  }
  flush_until(window_end + 1);
  double ticks = static_cast<double>(window_end - window_start + 1);
  double avg_outstanding = outstanding_sum / ticks;
  if (avg_outstanding <= 0.0)
    fail(Err::ZeroOutstanding, std::string("group ") + to_string(g) + " has nothing outstanding");
  return transferred / avg_outstanding;
}

double distribution_shift(std::span<const double> holdings_a, std::span<const double> holdings_b) {
  if (holdings_a.size() != holdings_b.size())
    fail(Err::MismatchedAgents, "holdings vectors differ in length");
  double sa = std::accumulate(holdings_a.begin(), holdings_a.end(), 0.0);
  double sb = std::accumulate(holdings_b.begin(), holdings_b.end(), 0.0);
  double shift = 0.0;
  for (std::size_t i = 0; i < holdings_a.size(); ++i) {
    double na = sa > 0.0 ? holdings_a[i] / sa : 0.0;
    double nb = sb > 0.0 ? holdings_b[i] / sb : 0.0;
    shift += std::abs(na - nb);
  }
  return shift;
}

std::vector<Episode> detect_boom_bust(std::span<const double> series, std::size_t baseline_window,
                                      double k, std::size_t respond_window, std::size_t min_run) {
  if (baseline_window < 2) fail(Err::RangeViolation, "baseline window too small");
  if (min_run < 1) fail(Err::RangeViolation, "min_run must be at least 1");
  if (series.size() < baseline_window + 2 * min_run)
    fail(Err::SeriesTooShort, std::to_string(series.size()) + " points, need at least " +
                                  std::to_string(baseline_window + 2 * min_run));
  double n = static_cast<double>(baseline_window);
  double mean = 0.0;
  for (std::size_t i = 0; i < baseline_window; ++i) mean += series[i];
  mean /= n;
  double var = 0.0;
  for (std::size_t i = 0; i < baseline_window; ++i) {
    double d = series[i] - mean;
    var += d * d;
  }
  double sd = std::sqrt(var / n);
  double hi = mean + k * sd;
  double lo = mean - k * sd;

  std::vector<Episode> episodes;
  std::size_t i = baseline_window;
  while (i + min_run <= series.size()) {
    // find a boom run
    std::size_t run = 0;
    std::size_t start = i;
    while (start < series.size() && run < min_run) {
      if (series[start] > hi) {
        ++run;
        ++start;
      } else {
        run = 0;
        ++start;
      }
    }
    if (run < min_run) break;
    std::size_t boom_start = start - min_run;
    // extend the boom while it stays above the band
    std::size_t boom_end = start;
    while (boom_end < series.size() && series[boom_end] > hi) ++boom_end;
    std::size_t peak = boom_start;
    for (std::size_t j = boom_start; j < boom_end; ++j)
      if (series[j] > series[peak]) peak = j;
    // a bust run must follow within the response window
    std::size_t limit = std::min(series.size(), boom_end + respond_window);
    std::size_t brun = 0;
    std::size_t pos = boom_end;
    std::size_t bust_end = 0;
    bool found = false;
    while (pos < limit) {
      if (series[pos] < lo) {
        ++brun;
        if (brun >= min_run) {
          // extend through the whole bust
          std::size_t e = pos + 1;
          while (e < series.size() && series[e] < lo) ++e;
          bust_end = e;
          found = true;
          break;
        }
      } else {
        brun = 0;
      }
      ++pos;
    }
    if (found) {
      std::size_t bust_start = pos + 1 - min_run;
      std::size_t trough = bust_start;
      for (std::size_t j = bust_start; j < bust_end; ++j)
        if (series[j] < series[trough]) trough = j;
      episodes.push_back(Episode{boom_start, peak, trough});
      i = bust_end;
    } else {
      i = boom_end;
    }
  }
  return episodes;
}

}  // namespace psim
