#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "crnapprox/continuum.hpp"
#include "crnapprox/coupled.hpp"
#include "crnapprox/diagnostics.hpp"
#include "crnapprox/errors.hpp"
#include "crnapprox/model_io.hpp"
#include "crnapprox/studies.hpp"

using namespace crn;

namespace {

SimConfig config(std::vector<double> x0, double horizon, double step, double volume = 100.0,
                 std::uint64_t seed = 1) {
  SimConfig c;
  c.x0 = std::move(x0);
  c.horizon = horizon;
  c.em_step = step;
  c.volume = volume;
  c.seed = seed;
  return c;
}

double max_gap(const Trajectory& a, const Trajectory& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.dimension(); ++j) gap = std::max(gap, std::abs(a.state(i)[j] - b.state(i)[j]));
  return gap;
}

}  // namespace

TEST_CASE("step grid shortens the last step") {
  const StepGrid grid(1.0, 0.3);
  CHECK(grid.steps == 4);
  CHECK(grid.time(4) == 1.0);
  CHECK(grid.width(3) == doctest::Approx(0.1));
  const StepGrid exact(2.0, 1e-3);
  CHECK(exact.steps == 2000);
}

TEST_CASE("ODE stays at the bistable saddle and at the origin") {
  const auto bi = make_bistable();
  const auto saddle = solve_ode(bi, config({2.0, 0.5}, 20.0, 1e-3));
  CHECK(saddle.size() == 20001);
  for (std::size_t i = 0; i < saddle.size(); ++i) {
    CHECK(std::abs(saddle.state(i)[0] - 2.0) < 1e-8);
    CHECK(std::abs(saddle.state(i)[1] - 0.5) < 1e-8);
  }
  const auto origin = solve_ode(bi, config({0.0, 0.0}, 20.0, 1e-2));
  for (std::size_t i = 0; i < origin.size(); ++i) {
    CHECK(origin.state(i)[0] == 0.0);
    CHECK(origin.state(i)[1] == 0.0);
  }
}

TEST_CASE("metabolism m=3 oscillation is damped") {
  const auto tr = solve_ode(make_metabolism(3), config({1.1, 1.1}, 5.0, 1e-3));
  std::vector<double> peaks;
  for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
    const double e = tr.state(i)[1];
    if (e > tr.state(i - 1)[1] && e >= tr.state(i + 1)[1] && e > 1.0) peaks.push_back(e);
  }
  REQUIRE(peaks.size() >= 3);
  for (std::size_t i = 1; i < peaks.size(); ++i) CHECK(peaks[i] < peaks[i - 1]);
}

TEST_CASE("RK4 is fourth order on exponential decay") {
  const ReactionNetwork decay("decay", {"X"}, {{{1}, {0}, 1.0}});
  auto error = [&](double step) {
    const auto tr = solve_ode(decay, config({1.0}, 5.0, step));
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i)
      worst = std::max(worst, std::abs(tr.state(i)[0] - std::exp(-tr.times()[i])));
    return worst;
  };
  const double ratio = error(0.1) / error(0.05);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("ODE refuses to leave the orthant") {
  const ReactionNetwork fast("fast", {"X"}, {{{1}, {0}, 1e4}});
  CHECK_THROWS_AS(solve_ode(fast, config({1.0}, 1.0, 1e-2)), SimulationError);
}

TEST_CASE("Euler-Maruyama with zero rates is constant") {
  const auto still = make_metabolism(3).with_rate_constants(std::vector<double>(6, 0.0));
  const auto tr = simulate_em(still, config({0.7, 1.3}, 1.0, 1e-2));
  CHECK(tr.size() == 101);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(tr.state(i)[0] == 0.7);
    CHECK(tr.state(i)[1] == 1.3);
  }
}

TEST_CASE("Euler-Maruyama determinism and final-state variant") {
  const auto net = make_metabolism(3);
  const auto cfg = config({1.0, 1.0}, 2.0, 1e-3, 600.0, 5);
  const auto a = simulate_em(net, cfg);
  CHECK(a == simulate_em(net, cfg));
  const auto last = simulate_em_final(net, cfg);
  CHECK(std::vector<double>(a.back().begin(), a.back().end()) == last);
  CHECK_FALSE(a == simulate_em(net, config({1.0, 1.0}, 2.0, 1e-3, 600.0, 6)));
}

TEST_CASE("Euler-Maruyama noise shrinks with V") {
  const auto net = make_metabolism(0);
  std::vector<double> previous;
  double last_median = 1e9;
  for (double volume : {1e2, 1e3, 1e4}) {
    const auto ode = solve_ode(net, config({0.5, 0.5}, 5.0, 1e-3, volume));
    std::vector<double> gaps;
    for (std::uint64_t s = 0; s < 20; ++s)
      gaps.push_back(max_gap(simulate_em(net, config({0.5, 0.5}, 5.0, 1e-3, volume, s)), ode));
    const double m = median(gaps);
    CHECK(m < last_median);
    last_median = m;
  }
}

TEST_CASE("Euler-Maruyama near the boundary stays finite under clamping") {
  const auto bi = make_bistable();
  for (const auto& x0 : {std::vector<double>{1e-9, 0.0}, std::vector<double>{0.0, 1e-3},
                         std::vector<double>{0.01, 0.01}}) {
    for (std::uint64_t s = 0; s < 50; ++s) {
      auto cfg = config(x0, 1.0, 1e-2, 2.0, s);
      const auto tr = simulate_em(bi, cfg);
      for (std::size_t i = 0; i < tr.size(); ++i)
        for (double v : tr.state(i)) CHECK(std::isfinite(v));
    }
  }
}

TEST_CASE("absorb policy freezes at the origin") {
  auto cfg = config({0.004, 0.004}, 1.0, 1e-3, 100.0, 3);
  cfg.boundary_policy = BoundaryPolicy::absorb;
  const auto tr = simulate_em(make_bistable(), cfg);
  CHECK(tr.state(1)[0] == 0.0);
  CHECK(tr.back()[0] == 0.0);
  CHECK(tr.back()[1] == 0.0);

  cfg.x0 = {2.0, 0.5};
  cfg.horizon = 5.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    cfg.seed = s;
    const auto path = simulate_em(make_bistable(), cfg);
    for (std::size_t i = 0; i < path.size(); ++i)
      for (double v : path.state(i)) CHECK(v >= 0.0);
  }
}

TEST_CASE("large steps trigger an advisory warning") {
  std::vector<std::string> seen;
  set_warning_handler([&](std::string_view m) { seen.emplace_back(m); });
  simulate_em(make_metabolism(0), config({1.0, 1.0}, 1.0, 0.2));
  CHECK(seen.size() == 1);
  seen.clear();
  simulate_em(make_metabolism(0), config({1.0, 1.0}, 1.0, 1e-3));
  CHECK(seen.empty());
  set_warning_handler(nullptr);
}

TEST_CASE("basin classification") {
  const std::vector<std::vector<double>> eq = {{0.0, 0.0}, {6.0, 4.5}};
  CHECK(classify_basin(std::vector<double>{0.1, 0.1}, eq) == 0);
  CHECK(classify_basin(std::vector<double>{6.2, 4.4}, eq) == 1);
  CHECK(classify_basin(std::vector<double>{3.0, 2.25}, eq) == 0);
  CHECK_THROWS_AS(classify_basin(std::vector<double>{1.0}, eq), std::invalid_argument);
}
