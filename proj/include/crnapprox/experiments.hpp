#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crnapprox/network.hpp"

namespace crn {

struct ExperimentSpec {
  std::string name;  // metabolism | bistable-basins | kmt-demo | convergence | coupled-demo
  std::map<std::string, std::string> overrides;
  std::filesystem::path output_dir = ".";
};

struct TimingRecord {
  std::string method;
  double seconds = 0.0;
};

struct ExperimentResult {
  std::vector<std::filesystem::path> files;
  std::vector<TimingRecord> timings;
};

const std::vector<std::string>& experiment_names();

/// Documented override keys and their defaults for one experiment.
const std::map<std::string, std::string>& experiment_defaults(std::string_view name);

/// Runs one bundled experiment, writing CSVs into spec.output_dir (created
/// if needed).  Throws std::invalid_argument for unknown names or override
/// keys; simulation errors propagate.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// `method,wall_clock_seconds` rows, followed by a `# em_over_ssa_ratio=`
/// line when both methods are present.
std::string report_timings(std::span<const TimingRecord> timings);

/// Deficiency report of a network as plain text and as JSON.
std::string deficiency_text(const ReactionNetwork& network);
std::string deficiency_json(const ReactionNetwork& network);

}  // namespace crn
