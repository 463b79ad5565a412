#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psim/compare.hpp"
#include "psim/dynamics.hpp"
#include "psim/errors.hpp"
#include "psim/scenario.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

bool is_config_error(psim::Err e) {
  switch (e) {
    case psim::Err::SyntaxError:
    case psim::Err::MissingField:
    case psim::Err::UnknownKey:
    case psim::Err::RangeViolation:
    case psim::Err::InvalidConfig:
      return true;
    default:
      return false;
  }
}

int classify(const psim::SimError& e) {
  std::fprintf(stderr, "error: %s\n", e.what());
  return is_config_error(e.code()) ? kExitConfig : kExitRuntime;
}

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos < list.size()) {
    std::size_t comma = list.find(',', pos);
    if (comma == std::string::npos) comma = list.size();
    std::string token = list.substr(pos, comma - pos);
    if (!token.empty()) seeds.push_back(std::stoull(token));
    pos = comma + 1;
  }
  return seeds;
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir) {
  psim::ScenarioConfig cfg;
  try {
    cfg = psim::load_scenario(scenario_path);
  } catch (const psim::SimError& e) {
    return classify(e);
  }
  try {
    psim::RunResult result = psim::run_scenario(cfg, out_dir);
    std::fputs(psim::summary_json(cfg, result).c_str(), stdout);
    return 0;
  } catch (const psim::SimError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}

int cmd_compare(const std::string& path_a, const std::string& path_b,
                const std::string& seed_list, const std::string& out_dir) {
  std::vector<std::uint64_t> seeds;
  try {
    seeds = parse_seeds(seed_list);
  } catch (const std::exception&) {
    std::fprintf(stderr, "error: --seeds wants a comma-separated integer list\n");
    return kExitUsage;
  }
  if (seeds.empty()) {
    std::fprintf(stderr, "error: --seeds wants at least one seed\n");
    return kExitUsage;
  }
  psim::ScenarioConfig a, b;
  try {
    a = psim::load_scenario(path_a);
    b = psim::load_scenario(path_b);
  } catch (const psim::SimError& e) {
    return classify(e);
  }
  try {
    psim::CompareReport report = psim::compare_regimes(a, b, seeds);
    if (!out_dir.empty()) psim::write_compare_report(report, a, b, out_dir);
    std::fputs(psim::compare_json(report, a, b).c_str(), stdout);
    return 0;
  } catch (const psim::SimError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}

int cmd_validate(const std::string& scenario_path) {
  try {
    psim::ScenarioConfig cfg = psim::load_scenario(scenario_path);
    std::fputs(psim::serialize_scenario(cfg).c_str(), stdout);
    return 0;
  } catch (const psim::SimError& e) {
    return classify(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agent-based simulator of competing monetary regimes"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir;
  CLI::App* run = app.add_subcommand("run", "run one scenario and print its summary");
  run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "directory for events.csv, metrics.csv, summary.json");

  std::string path_a, path_b, seed_list, compare_out;
  CLI::App* compare = app.add_subcommand("compare", "run two scenarios across shared seeds");
  compare->add_option("--a", path_a, "first scenario JSON file")->required();
  compare->add_option("--b", path_b, "second scenario JSON file")->required();
  compare->add_option("--seeds", seed_list, "comma-separated seed list")->required();
  compare->add_option("--out", compare_out, "directory for compare.csv and compare.json");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "parse a scenario and echo it normalized");
  validate->add_option("--scenario", validate_path, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(scenario_path, out_dir);
    if (compare->parsed()) return cmd_compare(path_a, path_b, seed_list, compare_out);
    if (validate->parsed()) return cmd_validate(validate_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
