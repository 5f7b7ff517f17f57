#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "crnapprox/errors.hpp"
#include "crnapprox/model_io.hpp"
#include "crnapprox/network.hpp"

using namespace crn;

namespace {

// Determinant by permutation expansion; only used on matrices up to 4x4.
long long det_by_permutations(const std::vector<std::vector<long>>& m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long long total = 0;
  do {
    long long term = 1;
    for (std::size_t i = 0; i < n; ++i) term *= m[i][perm[i]];
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    total += (inversions % 2 == 0) ? term : -term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t r) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(r), true);
  do {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (pick[i]) s.push_back(i);
    out.push_back(s);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

// Largest r with a non-vanishing r x r minor.
std::size_t rank_by_minors(const IntMatrix& a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  for (std::size_t r = std::min(rows, cols); r > 0; --r)
    for (const auto& rs : subsets(rows, r))
      for (const auto& cs : subsets(cols, r)) {
        std::vector<std::vector<long>> minor(r, std::vector<long>(r));
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < r; ++j) minor[i][j] = a[rs[i]][cs[j]];
        if (det_by_permutations(minor) != 0) return r;
      }
  return 0;
}

ReactionNetwork random_network(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> dim(1, 4), coef(0, 2);
  const int d = dim(gen), k = dim(gen);
  std::vector<std::string> species;
  for (int i = 0; i < d; ++i) species.push_back("S" + std::to_string(i));
  std::vector<Reaction> reactions;
  while (static_cast<int>(reactions.size()) < k) {
    Reaction r{Stoichiometry(d), Stoichiometry(d), 1.0};
    for (int i = 0; i < d; ++i) {
      r.reactants[i] = coef(gen);
      r.products[i] = coef(gen);
    }
    if (r.reactants != r.products) reactions.push_back(r);
  }
  return ReactionNetwork("random", species, reactions);
}

}  // namespace

TEST_CASE("reaction vectors of the example networks") {
  const auto m3 = reaction_vectors(make_metabolism(3));
  CHECK(m3[2] == std::vector<long>{-1, 2});
  const auto bi = reaction_vectors(make_bistable());
  CHECK(bi[1] == std::vector<long>{-1, 1});
  const auto matrix = stoichiometric_matrix(make_bistable());
  REQUIRE(matrix.size() == 2);
  CHECK(matrix[0] == std::vector<long>{2, -1, -1, -1});
  CHECK(matrix[1] == std::vector<long>{-1, 1, 0, 0});
}

TEST_CASE("self-loop reactions are rejected") {
  CHECK_THROWS_AS(ReactionNetwork("loop", {"A"}, {{{1}, {1}, 1.0}}), ModelError);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(ReactionNetwork("empty", {}, {}), ModelError);
  CHECK_THROWS_AS(ReactionNetwork("dup", {"A", "A"}, {}), ModelError);
  CHECK_THROWS_AS(ReactionNetwork("len", {"A", "B"}, {{{1}, {0, 1}, 1.0}}), ModelError);
  CHECK_THROWS_AS(ReactionNetwork("neg", {"A"}, {{{-1}, {0}, 1.0}}), ModelError);
  CHECK_THROWS_AS(ReactionNetwork("rate", {"A"}, {{{1}, {0}, -1.0}}), ModelError);
  CHECK_THROWS_AS(ReactionNetwork("nan", {"A"}, {{{1}, {0}, std::nan("")}}), ModelError);
  CHECK_NOTHROW(ReactionNetwork("zero", {"A"}, {{{1}, {0}, 0.0}}));
}

TEST_CASE("complexes, linkage classes and deficiency of the examples") {
  const auto m0 = make_metabolism(0);
  CHECK(complexes(m0).size() == 3);
  CHECK(linkage_classes(m0) == 1);
  CHECK(deficiency(m0) == DeficiencyReport{3, 1, 2, 0});

  const auto m3 = make_metabolism(3);
  CHECK(complexes(m3).size() == 5);
  CHECK(linkage_classes(m3) == 2);
  CHECK(deficiency(m3) == DeficiencyReport{5, 2, 2, 1});

  // Hand count: complexes {Y, 2X, X+Y, X, 0}; classes {Y, 2X, X+Y} and {X, 0};
  // reaction vectors (2,-1), (-1,1), (-1,0), (-1,0) span the plane.
  const auto bi = make_bistable();
  const auto cs = complexes(bi);
  const std::vector<Complex> expected = {{{0, 0}}, {{0, 1}}, {{1, 0}}, {{1, 1}}, {{2, 0}}};
  CHECK(cs == expected);
  CHECK(deficiency(bi) == DeficiencyReport{5, 2, 2, 1});

  CHECK(complexes(ReactionNetwork("ab", {"A", "B"}, {{{1, 0}, {0, 1}, 1.0}})).size() == 2);
  const ReactionNetwork none("none", {"A"}, {});
  CHECK(linkage_classes(none) == 0);
  CHECK(deficiency(none).deficiency == 0);
}

TEST_CASE("exact rank matches minor enumeration on random small networks") {
  std::mt19937_64 gen(12345);
  for (int trial = 0; trial < 500; ++trial) {
    const auto net = random_network(gen);
    const auto matrix = stoichiometric_matrix(net);
    const std::size_t rank = exact_rank(matrix);
    CHECK(rank == rank_by_minors(matrix));
    CHECK(rank <= std::min(net.species_count(), net.reaction_count()));

    const auto report = deficiency(net);
    CHECK(report.deficiency >= 0);
    const auto sizes = linkage_class_sizes(net);
    CHECK(sizes.size() == report.linkage_classes);
    CHECK(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) == report.complexes_count);
  }
}

TEST_CASE("exact rank handles dependent and large-entry rows") {
  CHECK(exact_rank({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}}) == 2);
  CHECK(exact_rank({{0, 0}, {0, 0}}) == 0);
  CHECK(exact_rank({{1000000, 999999}, {999999, 999998}}) == 2);
  CHECK(exact_rank({}) == 0);
}

TEST_CASE("density rates under both conventions") {
  const auto m3 = make_metabolism(3);
  CHECK(density_rate(m3, 2, std::vector<double>{1.0, 1.0}) == doctest::Approx(10.0));
  CHECK(density_rate(m3, 2, std::vector<double>{0.0, 1.0}) == 0.0);

  const auto bi = make_bistable();
  const std::vector<double> x{3.0, 0.0};
  CHECK(density_rate(bi, 1, x) == doctest::Approx(9.0));
  const ReactionNetwork fact("bf", bi.species(), bi.reactions(), RateConvention::factorial);
  CHECK(density_rate(fact, 1, x) == doctest::Approx(4.5));

  CHECK_THROWS_AS(density_rate(bi, 0, std::vector<double>{-1e-3, 1.0}), std::domain_error);
  CHECK_THROWS_AS(density_rate(bi, 9, x), std::domain_error);
}

TEST_CASE("exact rates") {
  const auto bi = make_bistable();
  const ReactionNetwork fact("bf", bi.species(), bi.reactions(), RateConvention::factorial);
  const std::vector<std::int64_t> five{5, 0};
  CHECK(exact_rate(fact, 1, five, 10.0) == doctest::Approx(1.0));
  CHECK(exact_rate(bi, 1, five, 10.0) == doctest::Approx(2.5));
  const std::vector<std::int64_t> one{1, 0};
  CHECK(exact_rate(fact, 1, one, 10.0) == 0.0);
  CHECK(exact_rate(bi, 1, one, 10.0) == 0.0);
  CHECK_THROWS_AS(exact_rate(bi, 1, std::vector<std::int64_t>{-1, 0}, 10.0), std::domain_error);
}

TEST_CASE("factorial exact rate approaches the density rate") {
  const auto bi = make_bistable();
  const ReactionNetwork fact("bf", bi.species(), bi.reactions(), RateConvention::factorial);
  for (std::int64_t n : {100, 400, 2000}) {
    const double volume = static_cast<double>(n) / 2.0;
    const std::vector<std::int64_t> counts{n, n / 2};
    const std::vector<double> x{static_cast<double>(counts[0]) / volume, static_cast<double>(counts[1]) / volume};
    for (std::size_t k = 0; k < bi.reaction_count(); ++k) {
      const double exact = exact_rate(fact, k, counts, volume) / volume;
      const double fluid = density_rate(fact, k, x);
      CHECK(std::abs(exact - fluid) / fluid < 10.0 / static_cast<double>(n / 2));
    }
  }
}

TEST_CASE("rate functions are non-negative and vanish exactly on the reactant faces") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 3.0);
  const auto bi = make_bistable();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x{unit(gen), unit(gen)};
    if (trial % 3 == 0) x[trial % 2] = 0.0;
    for (std::size_t k = 0; k < bi.reaction_count(); ++k) {
      const double f = density_rate(bi, k, x);
      CHECK(f >= 0.0);
      bool face = false;
      for (const auto& term : bi.reactant_terms(k)) face = face || x[term.species] == 0.0;
      CHECK((f == 0.0) == face);
    }
  }
}

TEST_CASE("steady states of the bistable network") {
  const auto bi = make_bistable();
  const double l1 = 8, l2 = 1, l3 = 1, l4 = 1.5;
  const double D = l1 - 4 * l3 * l4;
  std::vector<std::vector<double>> states;
  for (double sign : {-1.0, 1.0}) {
    const double xbar = (l1 + sign * std::sqrt(l1 * D)) / (2 * l3);
    states.push_back({xbar, l2 * xbar * xbar / l1});  // Y balance: l1 y = l2 x^2
  }
  CHECK(states[0] == std::vector<double>{2.0, 0.5});
  CHECK(states[1] == std::vector<double>{6.0, 4.5});

  for (const auto& point : states) {
    const auto f = drift(bi, point);
    CHECK(std::abs(f[0]) < 1e-12);
    CHECK(std::abs(f[1]) < 1e-12);
  }
  CHECK(drift(bi, std::vector<double>{0.0, 0.0}) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("drift equals the term-by-term sum") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unit(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto net = random_network(gen);
    std::vector<double> x(net.species_count());
    for (auto& v : x) v = unit(gen);
    const auto f = drift(net, x);
    const auto vectors = reaction_vectors(net);
    std::vector<double> expected(net.species_count(), 0.0);
    for (std::size_t k = 0; k < net.reaction_count(); ++k)
      for (std::size_t i = 0; i < expected.size(); ++i)
        expected[i] += static_cast<double>(vectors[k][i]) * density_rate(net, k, x);
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(f[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}
