#include "crnapprox/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "crnapprox/sim_config.hpp"

namespace crn {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ssa: return "ssa";
    case Method::ode: return "ode";
    case Method::em: return "em";
    case Method::coupled_ssa: return "coupled-ssa";
    case Method::coupled_em: return "coupled-em";
  }
  return "unknown";
}

std::optional<Method> method_from_string(std::string_view text) {
  for (auto m : {Method::ssa, Method::ode, Method::em, Method::coupled_ssa, Method::coupled_em})
    if (to_string(m) == text) return m;
  return std::nullopt;
}

bool is_jump_method(Method method) {
  return method == Method::ssa || method == Method::coupled_ssa;
}

void Trajectory::push_back(double t, std::span<const double> state) {
  if (state.size() != dimension()) throw std::invalid_argument("state dimension mismatch");
  times_.push_back(t);
  data_.insert(data_.end(), state.begin(), state.end());
}

std::vector<double> Trajectory::sample(double t) const {
  if (empty()) throw std::logic_error("cannot sample an empty trajectory");
  if (t <= times_.front()) return {state(0).begin(), state(0).end()};
  if (t >= times_.back()) return {back().begin(), back().end()};
  // first index with time > t
  const auto upper = static_cast<std::size_t>(
      std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
  const auto left = state(upper - 1);
  if (is_jump_method(meta_.method)) return {left.begin(), left.end()};
  const auto right = state(upper);
  const double w = (t - times_[upper - 1]) / (times_[upper] - times_[upper - 1]);
  std::vector<double> out(dimension());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = left[i] + w * (right[i] - left[i]);
  return out;
}

namespace {

std::string format12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const Trajectory& trajectory) {
  const auto& meta = trajectory.meta();
  out << "# method=" << to_string(meta.method) << "\n";
  out << "# seed=" << meta.seed << "\n";
  out << "# V=" << format12(meta.volume) << "\n";
  out << "# model=" << meta.model << "\n";
  if (meta.step > 0.0) out << "# step=" << format12(meta.step) << "\n";
  out << "t";
  for (const auto& s : trajectory.species()) out << "," << s;
  out << "\n";
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    out << format12(trajectory.times()[i]);
    for (double v : trajectory.state(i)) out << "," << format12(v);
    out << "\n";
  }
}

Trajectory read_csv(std::istream& in) {
  TrajectoryMeta meta;
  std::vector<std::string> species;
  std::string line;
  bool have_header = false;
  std::vector<std::pair<double, std::vector<double>>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const auto value = line.substr(eq + 1);
      if (key == "method") {
        auto m = method_from_string(value);
        if (!m) throw std::runtime_error("trajectory CSV: unknown method '" + value + "'");
        meta.method = *m;
      } else if (key == "seed") {
        meta.seed = std::stoull(value);
      } else if (key == "V") {
        meta.volume = std::stod(value);
      } else if (key == "model") {
        meta.model = value;
      } else if (key == "step") {
        meta.step = std::stod(value);
      }
      continue;
    }
    std::stringstream fields(line);
    std::string cell;
    if (!have_header) {
      std::getline(fields, cell, ',');
      if (cell != "t") throw std::runtime_error("trajectory CSV: header must start with 't'");
      while (std::getline(fields, cell, ',')) species.push_back(cell);
      have_header = true;
      continue;
    }
    std::vector<double> values;
    while (std::getline(fields, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() != species.size() + 1)
      throw std::runtime_error("trajectory CSV: row width does not match header");
    rows.emplace_back(values.front(), std::vector<double>(values.begin() + 1, values.end()));
  }
  if (!have_header) throw std::runtime_error("trajectory CSV: missing header");
  Trajectory trajectory(std::move(species), meta);
  trajectory.reserve(rows.size());
  for (const auto& [t, state] : rows) trajectory.push_back(t, state);
  return trajectory;
}

std::optional<std::string> check_invariants(const Trajectory& trajectory,
                                            std::span<const std::vector<long>> reaction_vectors) {
  if (trajectory.empty()) return "trajectory is empty";
  const auto& times = trajectory.times();
  if (times.front() != 0.0) return "times[0] must be 0";
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) return "times not strictly increasing at row " + std::to_string(i);

  if (trajectory.meta().method != Method::ssa) return std::nullopt;

  const double volume = trajectory.meta().volume;
  const std::size_t d = trajectory.dimension();
  auto counts_at = [&](std::size_t row, std::vector<long>& out) -> std::optional<std::string> {
    for (std::size_t i = 0; i < d; ++i) {
      const double scaled = trajectory.state(row)[i] * volume;
      const double nearest = std::round(scaled);
      if (std::abs(scaled - nearest) > 1e-6 * std::max(1.0, std::abs(scaled)))
        return "state times V is not integer at row " + std::to_string(row);
      if (nearest < 0) return "negative molecule count at row " + std::to_string(row);
      out[i] = static_cast<long>(nearest);
    }
    return std::nullopt;
  };

  std::vector<long> previous(d), current(d), diff(d);
  if (auto err = counts_at(0, previous)) return err;
  for (std::size_t row = 1; row < trajectory.size(); ++row) {
    if (auto err = counts_at(row, current)) return err;
    for (std::size_t i = 0; i < d; ++i) diff[i] = current[i] - previous[i];
    const bool still = std::all_of(diff.begin(), diff.end(), [](long v) { return v == 0; });
    const bool last = row + 1 == trajectory.size();
    if (still) {
      if (!last) return "repeated state before the final row " + std::to_string(row);
    } else if (!reaction_vectors.empty()) {
      const bool matches = std::any_of(reaction_vectors.begin(), reaction_vectors.end(),
                                       [&](const std::vector<long>& l) { return l == diff; });
      if (!matches) return "jump at row " + std::to_string(row) + " is not a reaction vector";
    }
    previous = current;
  }
  return std::nullopt;
}

void SimConfig::validate(std::size_t species_count) const {
  if (!(volume > 0.0) || !std::isfinite(volume)) throw std::invalid_argument("volume must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon T must be positive");
  if (!(em_step > 0.0)) throw std::invalid_argument("step delta must be positive");
  if (!(kmt_step > 0.0)) throw std::invalid_argument("noise grid step Delta must be positive");
  if (x0.size() != species_count)
    throw std::invalid_argument("x0 has " + std::to_string(x0.size()) + " components, model has " +
                                std::to_string(species_count) + " species");
  for (double v : x0)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("x0 must be non-negative");
  if (absorb_threshold && !(*absorb_threshold >= 0.0))
    throw std::invalid_argument("absorb threshold must be non-negative");
  if (domain_upper_bounds) {
    if (domain_upper_bounds->size() != species_count)
      throw std::invalid_argument("domain bounds dimension does not match species count");
    for (double v : *domain_upper_bounds)
      if (!(v > 0.0)) throw std::invalid_argument("domain upper bounds must be positive");
  }
  if (!(noise_safety_factor >= 1.0)) throw std::invalid_argument("noise safety factor must be >= 1");
  if (max_events == 0) throw std::invalid_argument("event cap must be positive");
}

}  // namespace crn
