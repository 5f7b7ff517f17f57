#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crn {

/// How rate constants relate to the mass-action propensity.
///
/// `absorbed`: f_k(x) = lambda_k * prod x_i^c_ik (combinatorial factors are
/// already folded into lambda_k).
/// `factorial`: f_k(x) = lambda_k / prod c_ik! * prod x_i^c_ik, with the exact
/// CTMC rate lambda_k / V^(|c_k|-1) * prod binom(s_i, c_ik).
enum class RateConvention { absorbed, factorial };

std::string_view to_string(RateConvention convention);
std::optional<RateConvention> rate_convention_from_string(std::string_view text);

/// Dense stoichiometric coefficients, indexed by species position.
using Stoichiometry = std::vector<int>;

struct Reaction {
  Stoichiometry reactants;  // c_k
  Stoichiometry products;   // c'_k
  double rate_constant = 0.0;

  bool operator==(const Reaction&) const = default;
};

/// A reactant or product side of a reaction.  Compositions are dense over the
/// network's species, so equal multisets compare equal.
struct Complex {
  Stoichiometry composition;

  auto operator<=>(const Complex&) const = default;
  bool operator==(const Complex&) const = default;
};

struct DeficiencyReport {
  std::size_t complexes_count = 0;
  std::size_t linkage_classes = 0;
  std::size_t stoich_dim = 0;
  long deficiency = 0;

  bool operator==(const DeficiencyReport&) const = default;
};

/// Species, reactions and the rate convention.  Immutable after construction;
/// the constructor validates every structural invariant and throws ModelError.
///
/// Rate constants must be finite and non-negative here; model files are held
/// to the stricter rule lambda > 0 by the parser.
class ReactionNetwork {
 public:
  struct Term {
    std::size_t species;
    int coefficient;
  };

  ReactionNetwork(std::string name, std::vector<std::string> species,
                  std::vector<Reaction> reactions,
                  RateConvention convention = RateConvention::absorbed,
                  std::map<std::string, long> parameters = {});

  const std::string& name() const { return name_; }
  const std::vector<std::string>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  RateConvention convention() const { return convention_; }
  /// Integer generator parameters carried through serialization (e.g. "m").
  const std::map<std::string, long>& parameters() const { return parameters_; }

  std::size_t species_count() const { return species_.size(); }
  std::size_t reaction_count() const { return reactions_.size(); }
  std::optional<std::size_t> species_index(std::string_view id) const;

  /// Non-zero reactant coefficients of reaction k.
  std::span<const Term> reactant_terms(std::size_t k) const { return reactant_terms_[k]; }
  /// Non-zero entries of the reaction vector l_k.
  std::span<const Term> change_terms(std::size_t k) const { return change_terms_[k]; }

  /// Returns a copy with different rate constants (same structure).
  ReactionNetwork with_rate_constants(std::span<const double> rates) const;

  bool operator==(const ReactionNetwork& other) const;

  // Unchecked kernels used by the simulators.  Callers guarantee that x is
  // componentwise non-negative and counts are non-negative.
  double density_rate_unchecked(std::size_t k, std::span<const double> x) const;
  double exact_rate_unchecked(std::size_t k, std::span<const std::int64_t> counts,
                              double volume) const;
  /// lambda_k / V^(|c_k|-1); exact_rate = scale * prod of count factors.
  double exact_rate_scale(std::size_t k, double volume) const;
  double exact_rate_scaled(std::size_t k, std::span<const std::int64_t> counts,
                           double scale) const;

 private:
  std::string name_;
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
  RateConvention convention_;
  std::map<std::string, long> parameters_;
  std::vector<std::vector<Term>> reactant_terms_;
  std::vector<std::vector<Term>> change_terms_;
  std::vector<double> factorial_rate_;  // lambda_k / prod c_ik! or lambda_k
  std::vector<int> reactant_order_;     // <c_k>
};

using IntMatrix = std::vector<std::vector<long>>;

/// l_k = c'_k - c_k for every reaction, in reaction order.
std::vector<std::vector<long>> reaction_vectors(const ReactionNetwork& network);

/// d x K stoichiometric matrix with the reaction vectors as columns.
IntMatrix stoichiometric_matrix(const ReactionNetwork& network);

/// Rank over the rationals by fraction-free integer elimination.  Throws
/// std::overflow_error if intermediate values leave the int64 range.
std::size_t exact_rank(IntMatrix matrix);

/// Distinct complexes, sorted by composition.
std::vector<Complex> complexes(const ReactionNetwork& network);

/// Connected components of the undirected complex graph (one edge per reaction).
std::size_t linkage_classes(const ReactionNetwork& network);

/// Sizes of the linkage classes, in order of first appearance.
std::vector<std::size_t> linkage_class_sizes(const ReactionNetwork& network);

DeficiencyReport deficiency(const ReactionNetwork& network);

/// f_k(x).  Throws std::domain_error if any x_i < 0 or the index is invalid.
double density_rate(const ReactionNetwork& network, std::size_t reaction_index,
                    std::span<const double> x);

/// CTMC rate of reaction k in state `counts` at volume V.  Zero whenever some
/// species has fewer molecules than the reaction consumes.
double exact_rate(const ReactionNetwork& network, std::size_t reaction_index,
                  std::span<const std::int64_t> counts, double volume);

/// F(x) = sum_k l_k f_k(x).
std::vector<double> drift(const ReactionNetwork& network, std::span<const double> x);

}  // namespace crn
