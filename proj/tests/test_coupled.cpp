#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "crnapprox/coupled.hpp"
#include "crnapprox/model_io.hpp"
#include "crnapprox/ssa.hpp"
#include "stats.hpp"

using namespace crn;

namespace {

SimConfig config(std::vector<double> x0, double volume, double horizon, std::uint64_t seed) {
  SimConfig c;
  c.x0 = std::move(x0);
  c.volume = volume;
  c.horizon = horizon;
  c.seed = seed;
  c.em_step = 1e-3;
  c.kmt_step = 0.1;
  return c;
}

bool on_lattice(const Trajectory& path, double volume) {
  for (std::size_t i = 0; i < path.size(); ++i)
    for (double v : path.state(i)) {
      const double count = v * volume;
      if (count < -1e-9 || std::abs(count - std::round(count)) > 1e-6) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("zero rates leave both paths at x0") {
  const auto still = make_metabolism(3).with_rate_constants(std::vector<double>(6, 0.0));
  auto cfg = config({1.0, 1.0}, 100.0, 1.0, 1);
  cfg.domain_upper_bounds = std::vector<double>{3.0, 3.0};
  const auto run = simulate_coupled(still, cfg);
  CHECK(run.sup_distance == 0.0);
  CHECK_FALSE(run.exit_time);
  CHECK(run.ctmc_path.size() == 1001);
  for (std::size_t i = 0; i < run.ctmc_path.size(); ++i) {
    CHECK(run.ctmc_path.state(i)[0] == 1.0);
    CHECK(run.diffusion_path.state(i)[1] == 1.0);
  }
}

TEST_CASE("pure birth with matching grids reproduces the noise") {
  const ReactionNetwork birth("birth", {"X"}, {{{0}, {1}, 1.0}});
  // start away from zero so the diffusion path cannot leave the domain
  auto cfg = config({50.0}, 1.0, 8.0, 17);
  cfg.em_step = 0.125;
  cfg.kmt_step = 0.125;
  cfg.domain_upper_bounds = std::vector<double>{1000.0};
  const auto run = simulate_coupled(birth, cfg);
  REQUIRE(run.noise.size() == 1);
  const auto& noise = run.noise[0];
  REQUIRE(run.ctmc_path.size() == 65);
  REQUIRE(noise.poisson_path.size() >= 65);
  CHECK_FALSE(run.exit_time);
  for (std::size_t j = 0; j < run.ctmc_path.size(); ++j) {
    CHECK(run.ctmc_path.times()[j] == doctest::Approx(0.125 * static_cast<double>(j)));
    CHECK(run.ctmc_path.state(j)[0] == 50.0 + noise.poisson_path[j]);
    CHECK(run.diffusion_path.state(j)[0] == doctest::Approx(50.0 + noise.wiener_path[j]).epsilon(1e-12));
  }
}

TEST_CASE("paths share the grid and the initial state") {
  const auto run = simulate_coupled(make_metabolism(3), [] {
    auto c = config({1.0, 1.0}, 600.0, 0.5, 2);
    c.domain_upper_bounds = std::vector<double>{2.0, 2.0};
    return c;
  }());
  CHECK(run.ctmc_path.times() == run.diffusion_path.times());
  CHECK(run.ctmc_path.meta().method == Method::coupled_ssa);
  CHECK(run.diffusion_path.meta().method == Method::coupled_em);
  CHECK(run.ctmc_path.state(0)[0] == run.diffusion_path.state(0)[0]);
  CHECK(on_lattice(run.ctmc_path, 600.0));
  CHECK(run.noise.size() == 6);
  CHECK(run.sup_distance == path_sup_distance(run.ctmc_path, run.diffusion_path));
  CHECK(run.sup_distance > 0.0);
}

TEST_CASE("coupled runs are deterministic") {
  auto cfg = config({2.0, 0.5}, 100.0, 1.0, 9);
  cfg.domain_upper_bounds = std::vector<double>{9.0, 8.0};
  const auto a = simulate_coupled(make_bistable(), cfg);
  const auto b = simulate_coupled(make_bistable(), cfg);
  CHECK(a.ctmc_path == b.ctmc_path);
  CHECK(a.diffusion_path == b.diffusion_path);
  CHECK(a.sup_distance == b.sup_distance);
  cfg.seed = 10;
  CHECK_FALSE(simulate_coupled(make_bistable(), cfg).ctmc_path == a.ctmc_path);
}

TEST_CASE("exit stops the run") {
  auto cfg = config({2.0, 0.5}, 100.0, 3.5, 4);
  cfg.domain_upper_bounds = std::vector<double>{2.3, 0.8};
  bool saw_exit = false;
  for (std::uint64_t s = 0; s < 5 && !saw_exit; ++s) {
    cfg.seed = s;
    const auto run = simulate_coupled(make_bistable(), cfg);
    if (!run.exit_time) continue;
    saw_exit = true;
    CHECK(*run.exit_time < 3.5);
    CHECK(run.ctmc_path.times().back() == doctest::Approx(*run.exit_time));
    const auto c = run.ctmc_path.back();
    const auto d = run.diffusion_path.back();
    const bool outside = c[0] > 2.3 || c[1] > 0.8 || d[0] > 2.3 || d[1] > 0.8 || c[0] < 0 || c[1] < 0 ||
                         d[0] < 0 || d[1] < 0;
    CHECK(outside);
  }
  CHECK(saw_exit);
}

TEST_CASE("default domain follows the fluid solution") {
  auto cfg = config({1.0, 1.0}, 100.0, 2.0, 1);
  const auto ub = coupled_domain(make_metabolism(0), cfg);
  REQUIRE(ub.size() == 2);
  CHECK(ub[0] >= 3.0);
  CHECK(ub[1] >= 3.0);
  cfg.domain_upper_bounds = std::vector<double>{4.0, 5.0};
  CHECK(coupled_domain(make_metabolism(0), cfg) == std::vector<double>{4.0, 5.0});
  const auto horizons = required_noise_horizons(make_metabolism(0), cfg, std::vector<double>{4.0, 5.0});
  CHECK(horizons[1] == doctest::Approx(1.5 * 100.0 * 2.0 * 1.0 * 4.0));
}

TEST_CASE("with matching grids the CTMC path has the SSA law") {
  const ReactionNetwork birth("birth", {"X"}, {{{0}, {1}, 5.0}});
  std::vector<double> coupled, direct;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    auto cfg = config({50.0}, 1.0, 2.0, s);
    cfg.em_step = 0.1;
    cfg.kmt_step = 0.1;
    cfg.domain_upper_bounds = std::vector<double>{1000.0};
    coupled.push_back(simulate_coupled(birth, cfg, {.keep_noise = false}).ctmc_path.back()[0]);
    cfg.seed = 50'000 + s;
    direct.push_back(simulate_ssa_final(birth, cfg)[0]);
  }
  CHECK(testing_stats::ks_two_sample_p(coupled, direct) > 0.01);
}

TEST_CASE("sup distance study") {
  const auto net = make_metabolism(0);
  auto cfg = config({0.5, 0.5}, 1.0, 1.0, 5);
  cfg.domain_upper_bounds = std::vector<double>{3.0, 3.0};
  const std::vector<double> one = {200.0};
  const auto single = sup_distance_study(net, cfg, one, 10);
  REQUIRE(single.size() == 1);
  CHECK(single[0].volume == 200.0);
  CHECK(single[0].seeds == 10);

  const std::vector<double> unsorted = {400.0, 200.0};
  const auto serial = sup_distance_study(net, cfg, unsorted, 10, Execution::serial);
  const auto parallel = sup_distance_study(net, cfg, unsorted, 10, Execution::parallel);
  REQUIRE(serial.size() == 2);
  CHECK(serial[0].volume == 200.0);
  CHECK(serial[0].median_sup_distance == parallel[0].median_sup_distance);
  CHECK(serial[1].median_sup_distance == parallel[1].median_sup_distance);
  CHECK(serial[0].median_sup_distance == single[0].median_sup_distance);

  CHECK_THROWS_AS(sup_distance_study(net, cfg, std::vector<double>{}, 10), std::invalid_argument);
  CHECK_THROWS_AS(sup_distance_study(net, cfg, one, 0), std::invalid_argument);
}

TEST_CASE("bistable pre-exit distance shrinks when V doubles") {
  auto cfg = config({2.0, 0.5}, 1.0, 2.0, 8);
  cfg.domain_upper_bounds = std::vector<double>{9.0, 8.0};
  const std::vector<double> volumes = {200.0, 400.0};
  const auto rows = sup_distance_study(make_bistable(), cfg, volumes, 20);
  CHECK(rows[1].median_sup_distance < rows[0].median_sup_distance);
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS_AS(median({}), std::invalid_argument);
}

TEST_CASE("coupled CSV layout") {
  auto cfg = config({1.0, 1.0}, 100.0, 0.01, 1);
  cfg.domain_upper_bounds = std::vector<double>{3.0, 3.0};
  const auto run = simulate_coupled(make_metabolism(0), cfg);
  std::ostringstream out;
  write_coupled_csv(out, run);
  const std::string text = out.str();
  CHECK(text.find("t,N_ctmc,E_ctmc,N_diff,E_diff\n") != std::string::npos);
  CHECK(text.find("# sup_distance=") != std::string::npos);
  CHECK(text.find("\n0,1,1,1,1\n") != std::string::npos);
}
