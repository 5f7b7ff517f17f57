#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crnapprox/network.hpp"
#include "crnapprox/sim_config.hpp"
#include "crnapprox/trajectory.hpp"

namespace crn {

/// round(x0 * V) componentwise, ties upward.  Throws std::invalid_argument on
/// a negative component.
std::vector<std::int64_t> initial_counts(std::span<const double> x0, double volume);

/// Gillespie direct method for the density process Y(t)/V on [0, T].
///
/// Each event draws the waiting time first (inverse-CDF exponential) and then
/// the channel (cumulative-sum search), from one generator seeded by
/// config.seed.  The trajectory holds the initial point, every jump, and a
/// final point at T.  Throws SimulationError past config.max_events.
Trajectory simulate_ssa(const ReactionNetwork& network, const SimConfig& config);

/// Same draws as simulate_ssa, keeping only the concentrations at T.
std::vector<double> simulate_ssa_final(const ReactionNetwork& network, const SimConfig& config);

/// Pointwise sample mean on `grid`.  All inputs must share method and model.
Trajectory mean_trajectory(std::span<const Trajectory> trajectories, std::span<const double> grid);

}  // namespace crn
