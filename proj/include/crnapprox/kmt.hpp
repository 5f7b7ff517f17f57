#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace crn {

/// Standard normal CDF, 0.5 * erfc(-x / sqrt 2) (absolute error ~1e-16).
double normal_cdf(double x);

/// n = 2^K standardized increments on a grid of step delta.  Either
/// Wiener-side (any reals) or Poisson-side, where sqrt(delta) * v + delta is
/// a non-negative integer count.
struct DyadicIncrements {
  double delta = 1.0;
  std::vector<double> values;

  /// K such that values.size() == 2^K; throws std::invalid_argument unless
  /// the length is a power of two >= 2.
  std::size_t levels() const;
};

/// Block sums V_{j,k} = T_{(k+1)2^j} - T_{k 2^j} (j = 0..K-1, k = 1..n-1)
/// and their half differences Vt_{q,k} = V_{q-1,2k} - V_{q-1,2k+1}
/// (q = 1..K-1, k = 1..n/2-1).  Cells outside the valid range hold 0.
class DyadicSums {
 public:
  DyadicSums(std::size_t levels, std::size_t length);

  std::size_t levels() const { return levels_; }
  std::size_t length() const { return length_; }

  double v(std::size_t j, std::size_t k) const { return v_[j * (length_ - 1) + (k - 1)]; }
  double vtilde(std::size_t q, std::size_t k) const {
    return vt_[(q - 1) * (length_ / 2 - 1) + (k - 1)];
  }
  double& v(std::size_t j, std::size_t k) { return v_[j * (length_ - 1) + (k - 1)]; }
  double& vtilde(std::size_t q, std::size_t k) { return vt_[(q - 1) * (length_ / 2 - 1) + (k - 1)]; }

 private:
  std::size_t levels_;
  std::size_t length_;
  std::vector<double> v_;   // K x (n-1)
  std::vector<double> vt_;  // (K-1) x (n/2-1)
};

DyadicSums build_dyadic_sums(const DyadicIncrements& increments);

/// F_j(x) = P(U_j < x), U_j the standardized Poisson(2^j delta) count.
double poisson_cdf_standardized(std::size_t level, double delta, double x);

/// G_j(t) = sup{x : F_j(x) <= t}; a standardized lattice point.  t in (0,1).
double quantile_G(std::size_t level, double delta, double t);

/// F_q(x | y) = P(A - B < sqrt(delta) x | A + B = sqrt(delta) y + 2^q delta)
/// for independent A, B ~ Poisson(2^(q-1) delta).  Computed through
/// A | A+B=m ~ Binomial(m, 1/2).  Throws std::domain_error off-lattice.
double conditional_cdf(std::size_t level, double delta, double x, double y);

/// G_q(t | y) = sup{x : F_q(x | y) <= t}; returns (2a - m) / sqrt(delta).
double conditional_quantile_G(std::size_t level, double delta, double t, double y);

/// Count-level forms of the two quantile transforms.
std::int64_t poisson_quantile_count(double mean, double t);
std::int64_t binomial_half_quantile_count(std::int64_t trials, double t);
double binomial_half_cdf(std::int64_t trials, std::int64_t successes);

/// Full state of one transform: block counts C_{j,k} = sqrt(delta) U_{j,k} + 2^j delta
/// for every computed cell, the conditional split values, and the first count.
struct KmtTrace {
  double delta = 1.0;
  std::size_t levels = 0;
  std::int64_t first_count = 0;                    // count behind N1
  std::vector<std::vector<std::int64_t>> counts;   // [j][k-1], k = 1..n/2^j - 1
  std::vector<std::vector<std::int64_t>> splits;   // [q-1][k-1]: A - B for the split of C_{q,k}

  /// Standardized U_{j,k}.
  double u(std::size_t j, std::size_t k) const;
  /// Standardized Ut_{q,k} = U_{q-1,2k} - U_{q-1,2k+1}.
  double utilde(std::size_t q, std::size_t k) const;
};

/// Hungarian construction for unit-rate Poisson increments: from standard
/// normal increments W_i build standardized Poisson increments N_i with
/// N_1 = G_0(Phi(W_1)), block sums U_{j,1} = G_j(Phi(2^(-j/2) V_{j,1})), and
/// each block split by the conditional quantile of its half difference.
DyadicIncrements kmt_transform(const DyadicIncrements& normals);
DyadicIncrements kmt_transform(const DyadicIncrements& normals, KmtTrace& trace);

/// Integer increment counts sqrt(delta) N_i + delta, i = 1..n.
std::vector<std::int64_t> kmt_increment_counts(std::span<const double> normals, double delta);

/// Discretized unit-rate Poisson process and unit-drift Wiener process on the
/// grid k * delta, k = 0..n, both anchored at 0.
struct PairedNoise {
  double delta = 1.0;
  std::vector<double> poisson_path;  // N(k delta), integer valued
  std::vector<double> wiener_path;   // W(k delta) = sum (sqrt(delta) W_i + delta)
  std::string channel;

  double horizon() const { return delta * static_cast<double>(poisson_path.size() - 1); }
};

PairedNoise assemble_paired_paths(const DyadicIncrements& normals, const DyadicIncrements& poissons);

/// Draws n standard normals from `seed`, transforms them, and assembles the
/// paired paths.  n must be a power of two >= 2.
PairedNoise generate_paired_noise(std::size_t n, double delta, std::uint64_t seed,
                                  std::string channel = {});

}  // namespace crn
