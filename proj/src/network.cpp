#include "crnapprox/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "crnapprox/errors.hpp"

namespace crn {

std::string_view to_string(RateConvention convention) {
  return convention == RateConvention::absorbed ? "absorbed" : "factorial";
}

std::optional<RateConvention> rate_convention_from_string(std::string_view text) {
  if (text == "absorbed") return RateConvention::absorbed;
  if (text == "factorial") return RateConvention::factorial;
  return std::nullopt;
}

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double int_power(double base, int exponent) {
  double r = 1.0;
  for (int e = 0; e < exponent; ++e) r *= base;
  return r;
}

}  // namespace

ReactionNetwork::ReactionNetwork(std::string name, std::vector<std::string> species,
                                 std::vector<Reaction> reactions, RateConvention convention,
                                 std::map<std::string, long> parameters)
    : name_(std::move(name)),
      species_(std::move(species)),
      reactions_(std::move(reactions)),
      convention_(convention),
      parameters_(std::move(parameters)) {
  if (species_.empty()) throw ModelError("network must declare at least one species");
  std::set<std::string_view> seen;
  for (const auto& s : species_) {
    if (s.empty()) throw ModelError("species identifiers must be non-empty");
    if (!seen.insert(s).second) throw ModelError("duplicate species '" + s + "'");
  }

  const std::size_t d = species_.size();
  reactant_terms_.resize(reactions_.size());
  change_terms_.resize(reactions_.size());
  factorial_rate_.resize(reactions_.size());
  reactant_order_.resize(reactions_.size());

  for (std::size_t k = 0; k < reactions_.size(); ++k) {
    const auto& r = reactions_[k];
    const std::string where = "reaction " + std::to_string(k + 1) + ": ";
    if (r.reactants.size() != d || r.products.size() != d)
      throw ModelError(where + "stoichiometry length does not match species count");
    if (!std::isfinite(r.rate_constant) || r.rate_constant < 0.0)
      throw ModelError(where + "rate constant must be finite and non-negative");
    if (r.reactants == r.products)
      throw ModelError(where + "reactants equal products (zero reaction vector)");

    double denominator = 1.0;
    int order = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const int c = r.reactants[i];
      const int cp = r.products[i];
      if (c < 0 || cp < 0)
        throw ModelError(where + "negative stoichiometric coefficient for '" + species_[i] + "'");
      if (c > 0) {
        reactant_terms_[k].push_back({i, c});
        denominator *= factorial(c);
        order += c;
      }
      if (cp != c) change_terms_[k].push_back({i, cp - c});
    }
    reactant_order_[k] = order;
    factorial_rate_[k] = convention_ == RateConvention::factorial ? r.rate_constant / denominator
                                                                  : r.rate_constant;
  }
}

std::optional<std::size_t> ReactionNetwork::species_index(std::string_view id) const {
  for (std::size_t i = 0; i < species_.size(); ++i)
    if (species_[i] == id) return i;
  return std::nullopt;
}

ReactionNetwork ReactionNetwork::with_rate_constants(std::span<const double> rates) const {
  if (rates.size() != reactions_.size())
    throw std::invalid_argument("rate vector length does not match reaction count");
  auto copy = reactions_;
  for (std::size_t k = 0; k < copy.size(); ++k) copy[k].rate_constant = rates[k];
  return ReactionNetwork(name_, species_, std::move(copy), convention_, parameters_);
}

bool ReactionNetwork::operator==(const ReactionNetwork& other) const {
  return name_ == other.name_ && species_ == other.species_ && reactions_ == other.reactions_ &&
         convention_ == other.convention_ && parameters_ == other.parameters_;
}

double ReactionNetwork::density_rate_unchecked(std::size_t k, std::span<const double> x) const {
  double rate = factorial_rate_[k];
  for (const auto& t : reactant_terms_[k]) rate *= int_power(x[t.species], t.coefficient);
  return rate;
}

double ReactionNetwork::exact_rate_scale(std::size_t k, double volume) const {
  return reactions_[k].rate_constant * std::pow(volume, 1 - reactant_order_[k]);
}

double ReactionNetwork::exact_rate_scaled(std::size_t k, std::span<const std::int64_t> counts,
                                          double scale) const {
  double rate = scale;
  for (const auto& t : reactant_terms_[k]) {
    const std::int64_t s = counts[t.species];
    if (s < t.coefficient) return 0.0;
    if (convention_ == RateConvention::factorial) {
      // binom(s, c) accumulated as a running product of exact ratios
      double b = 1.0;
      for (int j = 0; j < t.coefficient; ++j)
        b = b * static_cast<double>(s - j) / static_cast<double>(j + 1);
      rate *= b;
    } else {
      rate *= int_power(static_cast<double>(s), t.coefficient);
    }
  }
  return rate;
}

double ReactionNetwork::exact_rate_unchecked(std::size_t k, std::span<const std::int64_t> counts,
                                             double volume) const {
  return exact_rate_scaled(k, counts, exact_rate_scale(k, volume));
}

std::vector<std::vector<long>> reaction_vectors(const ReactionNetwork& network) {
  std::vector<std::vector<long>> out;
  out.reserve(network.reaction_count());
  for (const auto& r : network.reactions()) {
    std::vector<long> l(network.species_count());
    for (std::size_t i = 0; i < l.size(); ++i) l[i] = long{r.products[i]} - r.reactants[i];
    out.push_back(std::move(l));
  }
  return out;
}

IntMatrix stoichiometric_matrix(const ReactionNetwork& network) {
  const auto vectors = reaction_vectors(network);
  IntMatrix m(network.species_count(), std::vector<long>(vectors.size(), 0));
  for (std::size_t k = 0; k < vectors.size(); ++k)
    for (std::size_t i = 0; i < m.size(); ++i) m[i][k] = vectors[k][i];
  return m;
}

namespace {

long checked_mul(long a, long b) {
  long r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("exact_rank: int64 overflow");
  return r;
}

long checked_sub(long a, long b) {
  long r;
  if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("exact_rank: int64 overflow");
  return r;
}

void normalize_row(std::vector<long>& row) {
  long g = 0;
  for (long v : row) g = std::gcd(g, v);
  if (g > 1)
    for (long& v : row) v /= g;
}

}  // namespace

std::size_t exact_rank(IntMatrix m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size();
  const std::size_t cols = m.front().size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[rank], m[pivot]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (m[r][col] == 0) continue;
      const long a = m[rank][col];
      const long b = m[r][col];
      for (std::size_t c = col; c < cols; ++c)
        m[r][c] = checked_sub(checked_mul(a, m[r][c]), checked_mul(b, m[rank][c]));
      normalize_row(m[r]);
    }
    ++rank;
  }
  return rank;
}

std::vector<Complex> complexes(const ReactionNetwork& network) {
  std::vector<Complex> out;
  out.reserve(2 * network.reaction_count());
  for (const auto& r : network.reactions()) {
    out.push_back({r.reactants});
    out.push_back({r.products});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }

  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<std::size_t> linkage_class_sizes(const ReactionNetwork& network) {
  const auto nodes = complexes(network);
  auto index_of = [&](const Stoichiometry& s) {
    return static_cast<std::size_t>(
        std::lower_bound(nodes.begin(), nodes.end(), Complex{s}) - nodes.begin());
  };
  DisjointSets sets(nodes.size());
  for (const auto& r : network.reactions()) sets.unite(index_of(r.reactants), index_of(r.products));

  std::vector<std::size_t> root_order;
  std::map<std::size_t, std::size_t> sizes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto root = sets.find(i);
    if (sizes[root]++ == 0) root_order.push_back(root);
  }
  std::vector<std::size_t> out;
  for (auto root : root_order) out.push_back(sizes[root]);
  return out;
}

std::size_t linkage_classes(const ReactionNetwork& network) {
  return linkage_class_sizes(network).size();
}

DeficiencyReport deficiency(const ReactionNetwork& network) {
  DeficiencyReport report;
  report.complexes_count = complexes(network).size();
  report.linkage_classes = linkage_classes(network);
  report.stoich_dim = exact_rank(stoichiometric_matrix(network));
  report.deficiency = static_cast<long>(report.complexes_count) -
                      static_cast<long>(report.linkage_classes) -
                      static_cast<long>(report.stoich_dim);
  return report;
}

namespace {

void check_index(const ReactionNetwork& network, std::size_t k) {
  if (k >= network.reaction_count()) throw std::domain_error("reaction index out of range");
}

void check_state(const ReactionNetwork& network, std::span<const double> x) {
  if (x.size() != network.species_count())
    throw std::domain_error("state dimension does not match species count");
  for (double v : x)
    if (!(v >= 0.0)) throw std::domain_error("concentration must be non-negative");
}

}  // namespace

double density_rate(const ReactionNetwork& network, std::size_t reaction_index,
                    std::span<const double> x) {
  check_index(network, reaction_index);
  check_state(network, x);
  return network.density_rate_unchecked(reaction_index, x);
}

double exact_rate(const ReactionNetwork& network, std::size_t reaction_index,
                  std::span<const std::int64_t> counts, double volume) {
  check_index(network, reaction_index);
  if (counts.size() != network.species_count())
    throw std::domain_error("state dimension does not match species count");
  for (auto s : counts)
    if (s < 0) throw std::domain_error("molecule counts must be non-negative");
  if (!(volume > 0.0)) throw std::domain_error("volume must be positive");
  return network.exact_rate_unchecked(reaction_index, counts, volume);
}

std::vector<double> drift(const ReactionNetwork& network, std::span<const double> x) {
  check_state(network, x);
  std::vector<double> out(network.species_count(), 0.0);
  for (std::size_t k = 0; k < network.reaction_count(); ++k) {
    const double f = network.density_rate_unchecked(k, x);
    for (const auto& t : network.change_terms(k)) out[t.species] += t.coefficient * f;
  }
  return out;
}

}  // namespace crn
