#include "crnapprox/studies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crnapprox/continuum.hpp"
#include "crnapprox/rng.hpp"
#include "crnapprox/ssa.hpp"

namespace crn {

BasinEstimate basin_fraction(const ReactionNetwork& network, const SimConfig& config, Method method,
                             std::span<const std::vector<double>> equilibria,
                             std::size_t replications, Execution execution) {
  if (method != Method::ssa && method != Method::em)
    throw std::invalid_argument("basin_fraction supports ssa and em");
  const auto labels = replicate(replications, execution, [&](std::size_t i) {
    SimConfig run = config;
    run.seed = derive_seed(config.seed, i);
    const auto final_state =
        method == Method::ssa ? simulate_ssa_final(network, run) : simulate_em_final(network, run);
    return static_cast<unsigned char>(classify_basin(final_state, equilibria) == 0);
  });
  BasinEstimate estimate;
  estimate.replications = replications;
  estimate.in_first_basin = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  return estimate;
}

double jump_sup_distance(const Trajectory& jump, const Trajectory& continuous) {
  double sup = 0.0;
  auto update = [&](std::span<const double> a, std::span<const double> b) {
    for (std::size_t i = 0; i < a.size(); ++i) sup = std::max(sup, std::abs(a[i] - b[i]));
  };
  const double end = std::min(jump.times().back(), continuous.times().back());
  for (std::size_t r = 0; r < continuous.size() && continuous.times()[r] <= end; ++r)
    update(jump.sample(continuous.times()[r]), continuous.state(r));
  for (std::size_t r = 1; r < jump.size() && jump.times()[r] <= end; ++r) {
    const auto reference = continuous.sample(jump.times()[r]);
    update(jump.state(r - 1), reference);
    update(jump.state(r), reference);
  }
  return sup;
}

std::vector<SupDistanceRow> fluid_limit_study(const ReactionNetwork& network,
                                              const SimConfig& config_template,
                                              std::span<const double> volumes, std::size_t seeds,
                                              Execution execution) {
  if (volumes.empty() || seeds == 0) throw std::invalid_argument("fluid_limit_study: empty study");
  const auto ode = solve_ode(network, config_template);
  std::vector<double> sorted(volumes.begin(), volumes.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<SupDistanceRow> rows;
  for (double volume : sorted) {
    auto distances = replicate(seeds, execution, [&](std::size_t s) {
      SimConfig run = config_template;
      run.volume = volume;
      run.seed = derive_seed(config_template.seed, s);
      return jump_sup_distance(simulate_ssa(network, run), ode);
    });
    rows.push_back({volume, median(std::move(distances)), seeds});
  }
  return rows;
}

double loglog_slope(std::span<const SupDistanceRow> rows) {
  if (rows.size() < 2) throw std::invalid_argument("loglog_slope: need at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    const double lx = std::log(r.volume), ly = std::log(r.median_sup_distance);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(rows.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace crn
