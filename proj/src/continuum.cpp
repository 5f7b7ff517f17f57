#include "crnapprox/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "crnapprox/diagnostics.hpp"
#include "crnapprox/errors.hpp"
#include "crnapprox/rng.hpp"

namespace crn {

StepGrid::StepGrid(double horizon_, double step_) : steps(0), step(step_), horizon(horizon_) {
  if (!(step_ > 0.0) || !(horizon_ > 0.0)) throw std::invalid_argument("step and horizon must be positive");
  steps = static_cast<std::size_t>(std::ceil(horizon_ / step_ - 1e-9));
  if (steps == 0) steps = 1;
}

namespace {

constexpr double kOrthantTolerance = 1e-9;

// F(x) for RK4 stages; tiny negative round-off is read as 0.
void ode_drift(const ReactionNetwork& network, std::span<const double> x,
               std::vector<double>& clamped, std::vector<double>& out) {
  clamped.assign(x.begin(), x.end());
  for (double& v : clamped) {
    if (v < -kOrthantTolerance || !std::isfinite(v))
      throw SimulationError("ODE state left the non-negative orthant (value " + std::to_string(v) +
                            "); reduce the step");
    v = std::max(v, 0.0);
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < network.reaction_count(); ++k) {
    const double f = network.density_rate_unchecked(k, clamped);
    for (const auto& t : network.change_terms(k)) out[t.species] += t.coefficient * f;
  }
}

}  // namespace

Trajectory solve_ode(const ReactionNetwork& network, const SimConfig& config) {
  config.validate(network.species_count());
  const StepGrid grid(config.horizon, config.em_step);
  const std::size_t d = network.species_count();

  Trajectory trajectory(network.species(),
                        {Method::ode, config.volume, config.seed, network.name(), config.em_step});
  trajectory.reserve(grid.steps + 1);

  std::vector<double> x = config.x0, stage(d), clamped(d), k1(d), k2(d), k3(d), k4(d);
  trajectory.push_back(0.0, x);
  for (std::size_t j = 0; j < grid.steps; ++j) {
    const double h = grid.width(j);
    ode_drift(network, x, clamped, k1);
    for (std::size_t i = 0; i < d; ++i) stage[i] = x[i] + 0.5 * h * k1[i];
    ode_drift(network, stage, clamped, k2);
    for (std::size_t i = 0; i < d; ++i) stage[i] = x[i] + 0.5 * h * k2[i];
    ode_drift(network, stage, clamped, k3);
    for (std::size_t i = 0; i < d; ++i) stage[i] = x[i] + h * k3[i];
    ode_drift(network, stage, clamped, k4);
    for (std::size_t i = 0; i < d; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    for (double v : x)
      if (v < -kOrthantTolerance || !std::isfinite(v))
        throw SimulationError("ODE state left the non-negative orthant at t=" +
                              std::to_string(grid.time(j + 1)) + "; reduce the step");
    trajectory.push_back(grid.time(j + 1), x);
  }
  return trajectory;
}

namespace {

template <class OnStep>
std::vector<double> run_euler_maruyama(const ReactionNetwork& network, const SimConfig& config,
                                       OnStep&& on_step) {
  config.validate(network.species_count());
  const StepGrid grid(config.horizon, config.em_step);
  const std::size_t d = network.species_count();
  const std::size_t reactions = network.reaction_count();
  const double inv_sqrt_volume = 1.0 / std::sqrt(config.volume);
  const bool absorb = config.boundary_policy == BoundaryPolicy::absorb;
  const double threshold = config.effective_absorb_threshold();

  std::vector<double> x = config.x0, clamped(d), rates(reactions);
  {
    double fastest = 0.0;
    for (std::size_t k = 0; k < reactions; ++k)
      fastest = std::max(fastest, network.density_rate_unchecked(k, x));
    if (config.em_step * fastest >= 1.0)
      warn("Euler-Maruyama step " + std::to_string(config.em_step) +
           " is large relative to the fastest initial rate " + std::to_string(fastest));
  }

  Rng rng(config.seed);
  bool frozen = false;
  for (std::size_t j = 0; j < grid.steps; ++j) {
    if (!frozen) {
      const double h = grid.width(j);
      const double sqrt_h = std::sqrt(h);
      for (std::size_t i = 0; i < d; ++i) clamped[i] = std::max(x[i], 0.0);
      for (std::size_t k = 0; k < reactions; ++k)
        rates[k] = std::max(network.density_rate_unchecked(k, clamped), 0.0);
      for (std::size_t k = 0; k < reactions; ++k) {
        const double xi = rng.normal();
        const double increment = h * rates[k] + inv_sqrt_volume * std::sqrt(rates[k]) * sqrt_h * xi;
        for (const auto& t : network.change_terms(k)) x[t.species] += t.coefficient * increment;
      }
      for (double v : x)
        if (!std::isfinite(v))
          throw SimulationError("Euler-Maruyama produced a non-finite state at t=" +
                                std::to_string(grid.time(j + 1)));
      if (absorb) {
        bool below = true;
        for (double& v : x) {
          v = std::max(v, 0.0);
          below = below && v < threshold;
        }
        if (below) {
          std::fill(x.begin(), x.end(), 0.0);
          frozen = true;
        }
      }
    }
    on_step(grid.time(j + 1), x);
  }
  return x;
}

}  // namespace

Trajectory simulate_em(const ReactionNetwork& network, const SimConfig& config) {
  Trajectory trajectory(network.species(),
                        {Method::em, config.volume, config.seed, network.name(), config.em_step});
  trajectory.push_back(0.0, config.x0);
  run_euler_maruyama(network, config,
                     [&](double t, std::span<const double> x) { trajectory.push_back(t, x); });
  return trajectory;
}

std::vector<double> simulate_em_final(const ReactionNetwork& network, const SimConfig& config) {
  return run_euler_maruyama(network, config, [](double, auto&&) {});
}

std::size_t classify_basin(std::span<const double> state,
                           std::span<const std::vector<double>> equilibria) {
  if (equilibria.empty()) throw std::invalid_argument("classify_basin: no equilibria");
  std::size_t best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < equilibria.size(); ++e) {
    if (equilibria[e].size() != state.size())
      throw std::invalid_argument("classify_basin: dimension mismatch");
    double squared = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
      const double diff = state[i] - equilibria[e][i];
      squared += diff * diff;
    }
    if (squared < best_distance) {
      best_distance = squared;
      best = e;
    }
  }
  return best;
}

}  // namespace crn
