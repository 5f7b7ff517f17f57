#include "crnapprox/ssa.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "crnapprox/errors.hpp"
#include "crnapprox/rng.hpp"

namespace crn {

std::vector<std::int64_t> initial_counts(std::span<const double> x0, double volume) {
  std::vector<std::int64_t> counts(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    const double c = std::floor(x0[i] * volume + 0.5);
    if (c < 0) throw std::invalid_argument("initial state round(x0 * V) has a negative component");
    counts[i] = static_cast<std::int64_t>(c);
  }
  return counts;
}

namespace {

// Runs the direct method; on_jump(t, counts) fires after every applied event.
template <class OnJump>
std::vector<std::int64_t> run_direct_method(const ReactionNetwork& network, const SimConfig& config,
                                            OnJump&& on_jump) {
  config.validate(network.species_count());
  auto counts = initial_counts(config.x0, config.volume);

  const std::size_t reactions = network.reaction_count();
  std::vector<double> scale(reactions);
  for (std::size_t k = 0; k < reactions; ++k) scale[k] = network.exact_rate_scale(k, config.volume);
  std::vector<double> rates(reactions);

  Rng rng(config.seed);
  double t = 0.0;
  std::uint64_t events = 0;
  for (;;) {
    double total = 0.0;
    for (std::size_t k = 0; k < reactions; ++k) {
      rates[k] = network.exact_rate_scaled(k, counts, scale[k]);
      total += rates[k];
    }
    if (total <= 0.0) break;

    t += rng.exponential(total);
    if (t > config.horizon) break;

    const double target = rng.uniform() * total;
    std::size_t chosen = reactions;
    double cumulative = 0.0;
    for (std::size_t k = 0; k < reactions; ++k) {
      if (rates[k] <= 0.0) continue;
      chosen = k;
      cumulative += rates[k];
      if (target < cumulative) break;
    }

    for (const auto& term : network.change_terms(chosen)) counts[term.species] += term.coefficient;
    if (++events > config.max_events)
      throw SimulationError("SSA event cap of " + std::to_string(config.max_events) +
                            " exceeded at t=" + std::to_string(t) + "; reduce T or V");
    on_jump(t, counts);
  }
  return counts;
}

void to_concentrations(std::span<const std::int64_t> counts, double volume, std::vector<double>& out) {
  out.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / volume;
}

}  // namespace

Trajectory simulate_ssa(const ReactionNetwork& network, const SimConfig& config) {
  Trajectory trajectory(network.species(),
                        {Method::ssa, config.volume, config.seed, network.name(), 0.0});
  std::vector<double> x;
  to_concentrations(initial_counts(config.x0, config.volume), config.volume, x);
  trajectory.push_back(0.0, x);

  const auto final_counts =
      run_direct_method(network, config, [&](double t, std::span<const std::int64_t> counts) {
        to_concentrations(counts, config.volume, x);
        trajectory.push_back(t, x);
      });

  if (trajectory.times().back() < config.horizon) {
    to_concentrations(final_counts, config.volume, x);
    trajectory.push_back(config.horizon, x);
  }
  return trajectory;
}

std::vector<double> simulate_ssa_final(const ReactionNetwork& network, const SimConfig& config) {
  const auto counts = run_direct_method(network, config, [](double, auto&&) {});
  std::vector<double> x;
  to_concentrations(counts, config.volume, x);
  return x;
}

Trajectory mean_trajectory(std::span<const Trajectory> trajectories, std::span<const double> grid) {
  if (trajectories.empty()) throw std::invalid_argument("mean_trajectory: no trajectories");
  const auto& first = trajectories.front();
  for (const auto& tr : trajectories) {
    if (tr.empty()) throw std::invalid_argument("mean_trajectory: empty trajectory");
    if (tr.meta().method != first.meta().method || tr.meta().model != first.meta().model ||
        tr.dimension() != first.dimension())
      throw std::invalid_argument("mean_trajectory: trajectories differ in method or model");
  }
  for (double t : grid)
    if (t < 0.0) throw std::invalid_argument("mean_trajectory: grid time before 0");

  Trajectory mean(first.species(), first.meta());
  mean.reserve(grid.size());
  std::vector<double> acc(first.dimension());
  for (double t : grid) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (const auto& tr : trajectories) {
      if (t > tr.times().back() * (1.0 + 1e-12))
        throw std::invalid_argument("mean_trajectory: grid exceeds trajectory horizon");
      const auto s = tr.sample(t);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s[i];
    }
    for (double& v : acc) v /= static_cast<double>(trajectories.size());
    mean.push_back(t, acc);
  }
  return mean;
}

}  // namespace crn
