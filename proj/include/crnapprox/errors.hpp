#pragma once

#include <stdexcept>

namespace crn {

/// Invalid or inconsistent model description (bad JSON, unknown species, ...).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulation could not proceed: event cap hit, noise horizon exhausted,
/// non-finite state, state left the admissible region.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crn
