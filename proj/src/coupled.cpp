#include "crnapprox/coupled.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "crnapprox/continuum.hpp"
#include "crnapprox/errors.hpp"
#include "crnapprox/rng.hpp"
#include "crnapprox/ssa.hpp"

namespace crn {

namespace {

// Larger grids would need gigabytes per channel.
constexpr std::size_t kMaxNoiseLength = std::size_t{1} << 27;

}  // namespace

std::vector<double> coupled_domain(const ReactionNetwork& network, const SimConfig& config) {
  if (config.domain_upper_bounds) return *config.domain_upper_bounds;
  const auto ode = solve_ode(network, config);
  std::vector<double> upper(network.species_count(), 0.0);
  for (std::size_t r = 0; r < ode.size(); ++r)
    for (std::size_t i = 0; i < upper.size(); ++i) upper[i] = std::max(upper[i], ode.state(r)[i]);
  for (double& u : upper) u = 2.0 * u + 1.0;
  return upper;
}

std::vector<double> required_noise_horizons(const ReactionNetwork& network, const SimConfig& config,
                                            std::span<const double> upper_corner) {
  std::vector<double> horizons(network.reaction_count());
  for (std::size_t l = 0; l < horizons.size(); ++l)
    horizons[l] = config.noise_safety_factor * config.volume * config.horizon *
                  network.density_rate_unchecked(l, upper_corner);
  return horizons;
}

double path_sup_distance(const Trajectory& a, const Trajectory& b) {
  const std::size_t rows = std::min(a.size(), b.size());
  double sup = 0.0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t i = 0; i < a.dimension(); ++i)
      sup = std::max(sup, std::abs(a.state(r)[i] - b.state(r)[i]));
  return sup;
}

namespace {

struct ChannelClock {
  double internal_time = 0.0;
  std::size_t grid_index = 0;
};

std::size_t nearest_grid_index(double internal_time, double delta) {
  // nearest point, ties toward the smaller time
  const double scaled = internal_time / delta;
  const double index = std::ceil(scaled - 0.5);
  return index <= 0.0 ? 0 : static_cast<std::size_t>(index);
}

bool outside(std::span<const double> x, std::span<const double> upper) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < 0.0 || x[i] > upper[i]) return true;
  return false;
}

}  // namespace

CoupledRun simulate_coupled(const ReactionNetwork& network, const SimConfig& config,
                            const CoupledOptions& options) {
  config.validate(network.species_count());
  const std::size_t d = network.species_count();
  const std::size_t reactions = network.reaction_count();
  const double volume = config.volume;
  const double delta_noise = config.kmt_step;

  const auto upper = coupled_domain(network, config);
  const auto horizons = required_noise_horizons(network, config, upper);

  std::vector<PairedNoise> noise;
  noise.reserve(reactions);
  for (std::size_t l = 0; l < reactions; ++l) {
    const double points = std::ceil(horizons[l] / delta_noise);
    if (points > static_cast<double>(kMaxNoiseLength))
      throw SimulationError("noise grid for channel " + std::to_string(l + 1) + " would need " +
                            std::to_string(points) + " points; increase Delta or tighten the domain");
    const auto n = std::bit_ceil(std::max<std::size_t>(2, static_cast<std::size_t>(points)));
    noise.push_back(generate_paired_noise(n, delta_noise, derive_seed(config.seed, l),
                                          "R" + std::to_string(l + 1)));
  }

  auto counts = initial_counts(config.x0, volume);
  std::vector<double> x(d), g(d);
  for (std::size_t i = 0; i < d; ++i) x[i] = g[i] = static_cast<double>(counts[i]) / volume;

  CoupledRun run;
  run.ctmc_path = Trajectory(network.species(),
                             {Method::coupled_ssa, volume, config.seed, network.name(), config.em_step});
  run.diffusion_path = Trajectory(network.species(),
                                  {Method::coupled_em, volume, config.seed, network.name(), config.em_step});
  run.ctmc_path.push_back(0.0, x);
  run.diffusion_path.push_back(0.0, g);

  const StepGrid grid(config.horizon, config.em_step);
  std::vector<ChannelClock> ctmc_clock(reactions), diffusion_clock(reactions);
  std::vector<double> ctmc_rates(reactions), diffusion_rates(reactions);
  std::vector<double> g_next(d);

  auto advance = [&](ChannelClock& clock, double rate, double h, std::size_t l) {
    clock.internal_time += volume * h * rate;
    const auto index = nearest_grid_index(clock.internal_time, delta_noise);
    if (index >= noise[l].poisson_path.size())
      throw SimulationError("noise horizon exceeded on channel " + std::to_string(l + 1) +
                            ": internal time " + std::to_string(clock.internal_time) + " > " +
                            std::to_string(noise[l].horizon()) +
                            "; regenerate with a larger noise safety factor");
    const auto previous = clock.grid_index;
    clock.grid_index = index;
    return previous;
  };

  for (std::size_t j = 0; j < grid.steps; ++j) {
    const double h = grid.width(j);
    for (std::size_t l = 0; l < reactions; ++l) {
      ctmc_rates[l] = network.density_rate_unchecked(l, x);
      diffusion_rates[l] = network.density_rate_unchecked(l, g);
    }
    g_next = g;
    for (std::size_t l = 0; l < reactions; ++l) {
      const auto from = advance(ctmc_clock[l], ctmc_rates[l], h, l);
      const auto events = static_cast<std::int64_t>(noise[l].poisson_path[ctmc_clock[l].grid_index] -
                                                    noise[l].poisson_path[from]);
      for (const auto& t : network.change_terms(l)) counts[t.species] += t.coefficient * events;

      const auto from_g = advance(diffusion_clock[l], diffusion_rates[l], h, l);
      const double moved = noise[l].wiener_path[diffusion_clock[l].grid_index] -
                           noise[l].wiener_path[from_g];
      for (const auto& t : network.change_terms(l)) g_next[t.species] += t.coefficient * moved / volume;
    }
    g = g_next;
    for (std::size_t i = 0; i < d; ++i) x[i] = static_cast<double>(counts[i]) / volume;
    for (double v : g)
      if (!std::isfinite(v)) throw SimulationError("coupled diffusion path became non-finite");

    const double t = grid.time(j + 1);
    run.ctmc_path.push_back(t, x);
    run.diffusion_path.push_back(t, g);
    if (outside(x, upper) || outside(g, upper)) {
      run.exit_time = t;
      break;
    }
  }

  run.sup_distance = path_sup_distance(run.ctmc_path, run.diffusion_path);
  if (options.keep_noise) run.noise = std::move(noise);
  return run;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<long>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<long>(mid));
  return 0.5 * (lower + upper);
}

std::vector<SupDistanceRow> sup_distance_study(const ReactionNetwork& network,
                                               const SimConfig& config_template,
                                               std::span<const double> volumes, std::size_t seeds,
                                               Execution execution) {
  if (volumes.empty()) throw std::invalid_argument("sup_distance_study: no volumes");
  if (seeds == 0) throw std::invalid_argument("sup_distance_study: need at least one seed");
  std::vector<double> sorted(volumes.begin(), volumes.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<SupDistanceRow> rows;
  for (double volume : sorted) {
    auto distances = replicate(seeds, execution, [&](std::size_t s) {
      SimConfig config = config_template;
      config.volume = volume;
      config.seed = derive_seed(config_template.seed, s);
      return simulate_coupled(network, config, {.keep_noise = false}).sup_distance;
    });
    rows.push_back({volume, median(std::move(distances)), seeds});
  }
  return rows;
}

}  // namespace crn

#include <cstdio>
#include <ostream>

namespace crn {

namespace {
std::string g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
}  // namespace

void write_coupled_csv(std::ostream& out, const CoupledRun& run) {
  const auto& meta = run.ctmc_path.meta();
  out << "# method=coupled\n# seed=" << meta.seed << "\n# V=" << g12(meta.volume)
      << "\n# model=" << meta.model << "\n# step=" << g12(meta.step)
      << "\n# sup_distance=" << g12(run.sup_distance) << "\n";
  if (run.exit_time) out << "# exit_time=" << g12(*run.exit_time) << "\n";
  out << "t";
  for (const auto& s : run.ctmc_path.species()) out << "," << s << "_ctmc";
  for (const auto& s : run.diffusion_path.species()) out << "," << s << "_diff";
  out << "\n";
  for (std::size_t r = 0; r < run.ctmc_path.size(); ++r) {
    out << g12(run.ctmc_path.times()[r]);
    for (double v : run.ctmc_path.state(r)) out << "," << g12(v);
    for (double v : run.diffusion_path.state(r)) out << "," << g12(v);
    out << "\n";
  }
}

void write_study_csv(std::ostream& out, std::span<const SupDistanceRow> rows) {
  out << "V,median_sup_distance,seeds\n";
  for (const auto& r : rows) out << g12(r.volume) << "," << g12(r.median_sup_distance) << "," << r.seeds << "\n";
}

}  // namespace crn
