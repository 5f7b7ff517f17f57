#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crnapprox/network.hpp"
#include "crnapprox/sim_config.hpp"
#include "crnapprox/trajectory.hpp"

namespace crn {

/// Number of steps and the final (possibly shortened) step covering [0, T]
/// with nominal step delta.
struct StepGrid {
  std::size_t steps;
  double step;
  double horizon;

  StepGrid(double horizon, double step);
  double time(std::size_t j) const { return j == steps ? horizon : static_cast<double>(j) * step; }
  double width(std::size_t j) const { return time(j + 1) - time(j); }  // step j -> j+1
};

/// Classical RK4 with fixed step config.em_step on x' = F(x), output on the
/// step grid.  Throws SimulationError if a stage leaves the orthant by more
/// than 1e-9.
Trajectory solve_ode(const ReactionNetwork& network, const SimConfig& config);

/// Euler-Maruyama for the chemical Langevin equation
///   x += delta * sum_k l_k f_k(x) + sum_k l_k / sqrt(V) * sqrt(f_k(x) delta) * xi_k
/// with one normal per channel per step, drawn in channel order.  Rates are
/// evaluated at max(x, 0).  The boundary policy is applied after every step.
Trajectory simulate_em(const ReactionNetwork& network, const SimConfig& config);

/// Same draws as simulate_em, keeping only the state at T.
std::vector<double> simulate_em_final(const ReactionNetwork& network, const SimConfig& config);

/// Index of the Euclidean-nearest equilibrium; ties go to the lowest index.
std::size_t classify_basin(std::span<const double> state,
                           std::span<const std::vector<double>> equilibria);

}  // namespace crn
