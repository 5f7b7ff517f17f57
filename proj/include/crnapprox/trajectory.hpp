#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crn {

enum class Method { ssa, ode, em, coupled_ssa, coupled_em };

std::string_view to_string(Method method);
std::optional<Method> method_from_string(std::string_view text);
/// Jump processes are read left-constant, continuous ones linearly.
bool is_jump_method(Method method);

struct TrajectoryMeta {
  Method method = Method::ssa;
  double volume = 1.0;
  std::uint64_t seed = 0;
  std::string model;
  double step = 0.0;  // integration step for ode / em / coupled, 0 for ssa

  bool operator==(const TrajectoryMeta&) const = default;
};

/// Time-stamped concentration path.  States are stored row-major.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<std::string> species, TrajectoryMeta meta)
      : species_(std::move(species)), meta_(std::move(meta)) {}

  void push_back(double t, std::span<const double> state);
  void reserve(std::size_t points) {
    times_.reserve(points);
    data_.reserve(points * dimension());
  }

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  std::size_t dimension() const { return species_.size(); }
  const std::vector<double>& times() const { return times_; }
  std::span<const double> state(std::size_t i) const {
    return {data_.data() + i * dimension(), dimension()};
  }
  std::span<const double> back() const { return state(size() - 1); }
  const std::vector<std::string>& species() const { return species_; }
  const TrajectoryMeta& meta() const { return meta_; }
  TrajectoryMeta& meta() { return meta_; }

  /// State at time t: left-constant for jump methods, linear otherwise.
  /// Clamps to the end points outside [times.front(), times.back()].
  std::vector<double> sample(double t) const;

  bool operator==(const Trajectory&) const = default;

 private:
  std::vector<std::string> species_;
  TrajectoryMeta meta_;
  std::vector<double> times_;
  std::vector<double> data_;
};

/// Header `t,<species...>`, values with 12 significant digits, metadata as
/// leading `#` comment lines.
void write_csv(std::ostream& out, const Trajectory& trajectory);
Trajectory read_csv(std::istream& in);

/// Checks the structural invariants (time ordering, non-negative lattice
/// states and single-reaction jumps for ssa).  Returns a description of the
/// first violation, or nothing.  `reaction_vectors` is only used for ssa.
std::optional<std::string> check_invariants(
    const Trajectory& trajectory, std::span<const std::vector<long>> reaction_vectors = {});

}  // namespace crn
