// Command-line front end: run scenario files, verify the bundled
// experiments, or print the scenario schema.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "ssm/emit.hpp"
#include "ssm/scenario.hpp"
#include "ssm/simulation.hpp"
#include "ssm/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitAcceptance = 2;
constexpr int kExitNumeric = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ssm::ScenarioError("cannot read scenario file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run_command(const std::string& scenario_path, const std::string& method_name,
                const std::string& out_dir, double horizon_override,
                double scan_step_override) {
  ssm::Scenario scenario = ssm::load_scenario(read_file(scenario_path));
  if (horizon_override > 0.0) scenario.sim.horizon = horizon_override;
  if (scan_step_override > 0.0) scenario.sim.scan_step = scan_step_override;

  ssm::RunMethod method = ssm::RunMethod::Both;
  if (method_name == "analytic") method = ssm::RunMethod::Analytic;
  else if (method_name == "numeric") method = ssm::RunMethod::Numeric;
  else if (method_name != "both") {
    throw ssm::ScenarioError("method must be analytic, numeric, or both");
  }

  const ssm::RunRecord record = ssm::run(scenario, method);

  std::filesystem::create_directories(out_dir);
  const std::string stem = std::filesystem::path(scenario_path).stem().string();
  const std::string csv_path = out_dir + "/" + stem + ".csv";
  ssm::emit_csv(record, csv_path);
  std::cout << "wrote " << csv_path << "\n";
  for (const auto& snap : record.snapshots) {
    ssm::emit_snapshot_plotdata(scenario, snap, out_dir);
  }
  if (!record.snapshots.empty()) {
    std::cout << "wrote " << record.snapshots.size() << " snapshot(s) to "
              << out_dir << "\n";
  }
  return kExitOk;
}

int verify_command() {
  bool all_passed = true;
  for (const auto& outcome : ssm::run_acceptance_criteria()) {
    std::cout << (outcome.passed ? "PASS" : "FAIL") << "  criterion "
              << outcome.number << ": " << outcome.title << " — "
              << outcome.detail << "\n";
    all_passed = all_passed && outcome.passed;
  }
  return all_passed ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surrogate safety measure scenario runner"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string method = "both";
  std::string out_dir = "out";
  double horizon = -1.0;
  double scan_step = -1.0;

  auto* run_cmd = app.add_subcommand("run", "run a scenario file and emit CSV/snapshots");
  run_cmd->add_option("--scenario", scenario_path, "scenario file path")->required();
  run_cmd->add_option("--method", method, "analytic | numeric | both");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--horizon", horizon, "override forecast horizon (s)");
  run_cmd->add_option("--scan-step", scan_step, "override coarse scan step (s)");

  auto* verify_cmd =
      app.add_subcommand("verify", "run the bundled experiments against their thresholds");
  auto* schema_cmd = app.add_subcommand("schema", "print the scenario text schema");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return run_command(scenario_path, method, out_dir, horizon, scan_step);
    }
    if (verify_cmd->parsed()) {
      return verify_command();
    }
    if (schema_cmd->parsed()) {
      std::cout << ssm::scenario_schema_text();
      return kExitOk;
    }
  } catch (const ssm::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
