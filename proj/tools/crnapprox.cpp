// crnapprox: command-line front end.
//
//   crnapprox analyze <model.json> [--m M] [--format text|json|both]
//   crnapprox simulate <model.json> --method ssa|ode|em|coupled --x0 a,b,... [options]
//   crnapprox experiment <name> [key=value ...] [--out-dir DIR]
//
// Exit codes: 0 success, 1 usage, 2 model error, 3 runtime error.

#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crnapprox/continuum.hpp"
#include "crnapprox/coupled.hpp"
#include "crnapprox/errors.hpp"
#include "crnapprox/experiments.hpp"
#include "crnapprox/model_io.hpp"
#include "crnapprox/ssa.hpp"

namespace {

enum ExitCode { kSuccess = 0, kUsage = 1, kModel = 2, kRuntime = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AnalyzeArgs {
  std::string model;
  std::optional<int> m;
  std::string format = "both";
};

struct SimulateArgs {
  std::string model;
  std::optional<int> m;
  std::string method;
  std::vector<double> x0;
  double volume = 1.0;
  double tmax = 1.0;
  std::uint64_t seed = 0;
  double delta = 1e-3;
  double Delta = 0.1;
  std::string out;
  std::string boundary = "clamp";
  std::optional<double> absorb_threshold;
  std::vector<double> upper;
  double safety = 1.5;
  std::uint64_t max_events = 100'000'000;
};

struct ExperimentArgs {
  std::string name;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
};

crn::ModelOptions model_options(const std::optional<int>& m) {
  crn::ModelOptions options;
  options.metabolism_m = m;
  return options;
}

int run_analyze(const AnalyzeArgs& args) {
  const auto net = crn::parse_model(args.model, model_options(args.m));
  if (args.format != "json") std::cout << crn::deficiency_text(net);
  if (args.format != "text") std::cout << crn::deficiency_json(net);
  return kSuccess;
}

int run_simulate(const SimulateArgs& args) {
  const auto net = crn::parse_model(args.model, model_options(args.m));

  crn::SimConfig cfg;
  cfg.volume = args.volume;
  cfg.x0 = args.x0;
  cfg.horizon = args.tmax;
  cfg.seed = args.seed;
  cfg.em_step = args.delta;
  cfg.kmt_step = args.Delta;
  cfg.boundary_policy = args.boundary == "absorb" ? crn::BoundaryPolicy::absorb : crn::BoundaryPolicy::clamp;
  cfg.absorb_threshold = args.absorb_threshold;
  if (!args.upper.empty()) cfg.domain_upper_bounds = args.upper;
  cfg.noise_safety_factor = args.safety;
  cfg.max_events = args.max_events;
  try {
    cfg.validate(net.species_count());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::ofstream file;
  if (!args.out.empty()) {
    file.open(args.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + args.out);
  }
  std::ostream& out = args.out.empty() ? std::cout : file;

  if (args.method == "coupled") {
    crn::write_coupled_csv(out, crn::simulate_coupled(net, cfg, {.keep_noise = false}));
  } else if (args.method == "ssa") {
    crn::write_csv(out, crn::simulate_ssa(net, cfg));
  } else if (args.method == "ode") {
    crn::write_csv(out, crn::solve_ode(net, cfg));
  } else {
    crn::write_csv(out, crn::simulate_em(net, cfg));
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed");
  return kSuccess;
}

int run_experiment(const ExperimentArgs& args) {
  crn::ExperimentSpec spec;
  spec.name = args.name;
  spec.output_dir = args.out_dir;
  for (const auto& item : args.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("override '" + item + "' is not key=value");
    spec.overrides[item.substr(0, eq)] = item.substr(eq + 1);
  }
  crn::ExperimentResult result;
  try {
    result = crn::run_experiment(spec);
  } catch (const std::invalid_argument& e) {
    // unknown keys and out-of-range override values
    throw UsageError(e.what());
  }
  for (const auto& path : result.files) std::cout << path.string() << "\n";
  if (!result.timings.empty()) std::cout << crn::report_timings(result.timings);
  return kSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic chemical reaction networks: CTMC, fluid and diffusion approximations"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Deficiency report of a model");
  analyze_cmd->add_option("model", analyze.model, "Model JSON file")->required();
  analyze_cmd->add_option("--m", analyze.m, "Metabolism exponent m (regenerates the reactions)")
      ->check(CLI::NonNegativeNumber);
  analyze_cmd->add_option("--format", analyze.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "both"}));

  SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate one trajectory and write it as CSV");
  simulate_cmd->add_option("model", simulate.model, "Model JSON file")->required();
  simulate_cmd->add_option("--method", simulate.method, "Simulation method")
      ->required()
      ->check(CLI::IsMember({"ssa", "ode", "em", "coupled"}));
  simulate_cmd->add_option("--x0", simulate.x0, "Initial concentrations, comma separated")
      ->required()
      ->delimiter(',');
  simulate_cmd->add_option("--volume", simulate.volume, "System size V")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--tmax", simulate.tmax, "Horizon T")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", simulate.seed, "Random seed");
  simulate_cmd->add_option("--delta", simulate.delta, "ODE / Euler-Maruyama / coupled step")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--Delta", simulate.Delta, "KMT noise grid step")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--out", simulate.out, "Output CSV (default: stdout)");
  simulate_cmd->add_option("--m", simulate.m, "Metabolism exponent m")->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--boundary", simulate.boundary, "Boundary policy for em")
      ->check(CLI::IsMember({"clamp", "absorb"}));
  simulate_cmd->add_option("--absorb-threshold", simulate.absorb_threshold, "Freeze threshold (default 1/(2V))");
  simulate_cmd->add_option("--upper", simulate.upper, "Coupled domain upper corner, comma separated")
      ->delimiter(',');
  simulate_cmd->add_option("--safety", simulate.safety, "Noise horizon safety factor")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--max-events", simulate.max_events, "SSA event cap");

  ExperimentArgs experiment;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run a bundled experiment");
  experiment_cmd->add_option("name", experiment.name, "Experiment name")
      ->required()
      ->check(CLI::IsMember(crn::experiment_names()));
  experiment_cmd->add_option("overrides", experiment.overrides, "key=value parameter overrides");
  experiment_cmd->add_option("--out-dir", experiment.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*analyze_cmd) return run_analyze(analyze);
    if (*simulate_cmd) return run_simulate(simulate);
    return run_experiment(experiment);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const crn::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kModel;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
