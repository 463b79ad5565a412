#include "psim/compare.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "psim/errors.hpp"

namespace psim {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

CompareReport compare_regimes(const ScenarioConfig& a, const ScenarioConfig& b,
                              const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) fail(Err::InvalidConfig, "compare needs at least one seed");
  CompareReport report;
  for (std::uint64_t seed : seeds) {
    ScenarioConfig ca = a;
    ScenarioConfig cb = b;
    ca.seed = seed;
    cb.seed = seed;
    CompareRow row;
    row.seed = seed;
    row.a = run_scenario(ca, "").summary;
    row.b = run_scenario(cb, "").summary;
    if (row.a.gini_slope > row.b.gini_slope) ++report.gini_slope_a_higher;
    if (row.a.episodes.size() > row.b.episodes.size()) ++report.episodes_a_more;
    if (row.a.psi_mean_shift < row.b.psi_mean_shift) ++report.psi_shift_a_lower;
    report.mean_gini_slope_a += row.a.gini_slope;
    report.mean_gini_slope_b += row.b.gini_slope;
    report.rows.push_back(std::move(row));
  }
  report.mean_gini_slope_a /= static_cast<double>(seeds.size());
  report.mean_gini_slope_b /= static_cast<double>(seeds.size());
  return report;
}

std::string compare_csv(const CompareReport& report) {
  std::string out =
      "seed,gini_slope_a,gini_slope_b,episodes_a,episodes_b,psi_shift_a,psi_shift_b,"
      "psi_drift_a,psi_drift_b,cantillon_slope_a,cantillon_slope_b\n";
  for (const CompareRow& r : report.rows) {
    out += std::to_string(r.seed);
    out += ',';
    out += fmt(r.a.gini_slope);
    out += ',';
    out += fmt(r.b.gini_slope);
    out += ',';
    out += std::to_string(r.a.episodes.size());
    out += ',';
    out += std::to_string(r.b.episodes.size());
    out += ',';
    out += fmt(r.a.psi_mean_shift);
    out += ',';
    out += fmt(r.b.psi_mean_shift);
    out += ',';
    out += fmt(r.a.psi_drift);
    out += ',';
    out += fmt(r.b.psi_drift);
    out += ',';
    out += fmt(r.a.cantillon_measured ? r.a.cantillon_slope : 0.0);
    out += ',';
    out += fmt(r.b.cantillon_measured ? r.b.cantillon_slope : 0.0);
    out += '\n';
  }
  return out;
}

std::string compare_json(const CompareReport& report, const ScenarioConfig& a,
                         const ScenarioConfig& b) {
  using json = nlohmann::ordered_json;
  json j;
  j["regime_a"] = std::string(to_string(a.regime));
  j["regime_b"] = std::string(to_string(b.regime));
  j["seeds"] = report.rows.size();
  j["gini_slope_a_higher"] = report.gini_slope_a_higher;
  j["episodes_a_more"] = report.episodes_a_more;
  j["psi_shift_a_lower"] = report.psi_shift_a_lower;
  j["mean_gini_slope_a"] = report.mean_gini_slope_a;
  j["mean_gini_slope_b"] = report.mean_gini_slope_b;
  return j.dump(2) + "\n";
}

void write_compare_report(const CompareReport& report, const ScenarioConfig& a,
                          const ScenarioConfig& b, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream cf(out_dir + "/compare.csv", std::ios::binary);
  if (!cf) fail(Err::InvalidConfig, "cannot write to " + out_dir);
  cf << compare_csv(report);
  cf.close();
  std::ofstream jf(out_dir + "/compare.json", std::ios::binary);
  jf << compare_json(report, a, b);
  jf.close();
}

}  // namespace psim
