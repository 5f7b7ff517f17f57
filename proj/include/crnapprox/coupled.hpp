#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "crnapprox/kmt.hpp"
#include "crnapprox/network.hpp"
#include "crnapprox/replicate.hpp"
#include "crnapprox/sim_config.hpp"
#include "crnapprox/trajectory.hpp"

namespace crn {

struct CoupledRun {
  Trajectory ctmc_path;       // method coupled-ssa, lattice-valued
  Trajectory diffusion_path;  // method coupled-em
  std::vector<PairedNoise> noise;  // one per reaction channel (empty if not kept)
  double sup_distance = 0.0;
  std::optional<double> exit_time;
};

struct CoupledOptions {
  bool keep_noise = true;
};

/// Upper corner of the rectangular domain used for exit detection and the
/// noise horizon: config.domain_upper_bounds if set, otherwise
/// 2 * max_t x(t) + 1 per species along the ODE solution.
std::vector<double> coupled_domain(const ReactionNetwork& network, const SimConfig& config);

/// Internal-time horizon each channel's noise must cover:
/// safety * V * T * f_l(upper corner).
std::vector<double> required_noise_horizons(const ReactionNetwork& network, const SimConfig& config,
                                            std::span<const double> upper_corner);

/// Paired Euler schemes for the time-changed Poisson and time-changed Wiener
/// representations, driven by one KMT-coupled noise pair per channel.  Each
/// step advances channel l's internal clock by V * delta * f_l(state) for
/// each path separately, rounds it to the nearest Delta-grid point (ties to
/// the smaller), and moves the path by l / V times the noise increment.
/// Stops at the first grid time where either path leaves [0, upper corner].
/// Throws SimulationError("noise horizon exceeded ...") if a clock runs past
/// its pre-generated noise.
CoupledRun simulate_coupled(const ReactionNetwork& network, const SimConfig& config,
                            const CoupledOptions& options = {});

/// Max-norm distance between two paths sampled on the same grid.
double path_sup_distance(const Trajectory& a, const Trajectory& b);

struct SupDistanceRow {
  double volume = 0.0;
  double median_sup_distance = 0.0;
  std::size_t seeds = 0;
};

/// For each volume, the median over `seeds` coupled runs of the pre-exit sup
/// distance.  Run s uses seed derive_seed(config.seed, s).  Sorted by V.
std::vector<SupDistanceRow> sup_distance_study(const ReactionNetwork& network,
                                               const SimConfig& config_template,
                                               std::span<const double> volumes,
                                               std::size_t seeds = 10,
                                               Execution execution = Execution::parallel);

double median(std::vector<double> values);

}  // namespace crn

#include <iosfwd>

namespace crn {

/// Columns `t,<species>_ctmc...,<species>_diff...` on the shared grid, with
/// `#` metadata lines (seed, V, step, sup_distance, exit_time).
void write_coupled_csv(std::ostream& out, const CoupledRun& run);

/// `V,median_sup_distance,seeds`.
void write_study_csv(std::ostream& out, std::span<const SupDistanceRow> rows);

}  // namespace crn
