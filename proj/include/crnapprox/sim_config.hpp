#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace crn {

enum class BoundaryPolicy { clamp, absorb };

struct SimConfig {
  double volume = 1.0;            // V
  std::vector<double> x0;         // initial concentrations
  double horizon = 1.0;           // T
  std::uint64_t seed = 0;
  double em_step = 1e-3;          // delta: ODE / Euler-Maruyama / coupled Euler step
  double kmt_step = 0.1;          // Delta: grid of the paired noise, internal time units
  BoundaryPolicy boundary_policy = BoundaryPolicy::clamp;
  std::optional<double> absorb_threshold;  // defaults to 1 / (2V)
  std::optional<std::vector<double>> domain_upper_bounds;
  std::uint64_t max_events = 100'000'000;
  double noise_safety_factor = 1.5;

  double effective_absorb_threshold() const {
    return absorb_threshold ? *absorb_threshold : 1.0 / (2.0 * volume);
  }

  /// Throws std::invalid_argument on violated preconditions.
  void validate(std::size_t species_count) const;
};

}  // namespace crn
