#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crnapprox/coupled.hpp"
#include "crnapprox/network.hpp"
#include "crnapprox/replicate.hpp"
#include "crnapprox/sim_config.hpp"
#include "crnapprox/trajectory.hpp"

namespace crn {

struct BasinEstimate {
  std::size_t replications = 0;
  std::size_t in_first_basin = 0;

  double fraction() const {
    return replications == 0 ? 0.0 : static_cast<double>(in_first_basin) / static_cast<double>(replications);
  }
};

/// Fraction of replications whose state at T is nearest to equilibria[0].
/// `method` is ssa or em; replication i uses seed derive_seed(config.seed, i).
BasinEstimate basin_fraction(const ReactionNetwork& network, const SimConfig& config, Method method,
                             std::span<const std::vector<double>> equilibria,
                             std::size_t replications, Execution execution = Execution::parallel);

/// sup over t of the max-norm distance between a jump path and a continuous
/// path (linear between grid points), checked at every grid point of
/// `continuous` and on both sides of every jump of `jump`.
double jump_sup_distance(const Trajectory& jump, const Trajectory& continuous);

/// For each volume, the median over seeds of sup_{t<=T} |X^V(t) - x(t)|.
std::vector<SupDistanceRow> fluid_limit_study(const ReactionNetwork& network,
                                              const SimConfig& config_template,
                                              std::span<const double> volumes, std::size_t seeds,
                                              Execution execution = Execution::parallel);

/// Least-squares slope of log(median) against log(V).
double loglog_slope(std::span<const SupDistanceRow> rows);

}  // namespace crn
