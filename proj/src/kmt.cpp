#include "crnapprox/kmt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "crnapprox/rng.hpp"

namespace crn {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

std::size_t DyadicIncrements::levels() const {
  const auto n = values.size();
  if (n < 2 || !std::has_single_bit(n))
    throw std::invalid_argument("increment count " + std::to_string(n) +
                                " is not a power of two >= 2; round the horizon up");
  return static_cast<std::size_t>(std::countr_zero(n));
}

DyadicSums::DyadicSums(std::size_t levels, std::size_t length)
    : levels_(levels),
      length_(length),
      v_(levels * (length - 1), 0.0),
      vt_(levels > 0 ? (levels - 1) * (length / 2 - 1) : 0, 0.0) {}

namespace {

// Partial sums T_0..T_n.
std::vector<double> partial_sums(std::span<const double> values) {
  std::vector<double> t(values.size() + 1, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) t[i + 1] = t[i] + values[i];
  return t;
}

// V_{j,k} from partial sums; k may be 0 (then it is T_{2^j}).
double block_sum(const std::vector<double>& t, std::size_t j, std::size_t k) {
  return t[(k + 1) << j] - t[k << j];
}

}  // namespace

DyadicSums build_dyadic_sums(const DyadicIncrements& increments) {
  const std::size_t levels = increments.levels();
  const std::size_t n = increments.values.size();
  const auto t = partial_sums(increments.values);
  DyadicSums sums(levels, n);
  for (std::size_t j = 0; j < levels; ++j)
    for (std::size_t k = 1; k < (n >> j); ++k) sums.v(j, k) = block_sum(t, j, k);
  for (std::size_t q = 1; q < levels; ++q)
    for (std::size_t k = 1; k < (n >> q); ++k)
      sums.vtilde(q, k) = sums.v(q - 1, 2 * k) - sums.v(q - 1, 2 * k + 1);
  return sums;
}

namespace {

// Poisson CDF values P(C <= c) for c = 0..size-1, accumulated in log space
// and tabulated up to mean + 12 sd.
class PoissonTable {
 public:
  explicit PoissonTable(double mean) : mean_(mean), log_mean_(std::log(mean)) {
    const auto upper = static_cast<std::size_t>(std::ceil(mean + 12.0 * std::sqrt(mean) + 12.0));
    cdf_.reserve(upper + 1);
    double log_cdf = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c <= upper; ++c) {
      log_cdf = log_add(log_cdf, log_pmf(c));
      cdf_.push_back(std::exp(log_cdf));
    }
    tail_log_cdf_ = log_cdf;
  }

  double cdf(std::int64_t c) const {
    if (c < 0) return 0.0;
    if (static_cast<std::size_t>(c) < cdf_.size()) return cdf_[static_cast<std::size_t>(c)];
    double log_cdf = tail_log_cdf_;
    // the table ends past the mode, so the remaining terms only shrink
    for (auto i = static_cast<std::int64_t>(cdf_.size()); i <= c; ++i) {
      const double term = log_pmf(static_cast<std::size_t>(i));
      if (term < log_cdf - 40.0) break;
      log_cdf = log_add(log_cdf, term);
    }
    return std::min(1.0, std::exp(log_cdf));
  }

  // Smallest c with P(C <= c) > t.
  std::int64_t quantile(double t) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), t);
    if (it != cdf_.end()) return it - cdf_.begin();
    // t sits in the last ~1e-30 of mass; walk the tail until the sum moves past t
    double log_cdf = tail_log_cdf_;
    auto c = static_cast<std::int64_t>(cdf_.size());
    for (int guard = 0; guard < 4096; ++guard, ++c) {
      log_cdf = log_add(log_cdf, log_pmf(static_cast<std::size_t>(c)));
      if (std::exp(log_cdf) > t) return c;
    }
    return c;
  }

 private:
  double log_pmf(std::size_t c) const {
    const double cc = static_cast<double>(c);
    return cc * log_mean_ - mean_ - std::lgamma(cc + 1.0);
  }

  static double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
  }

  double mean_;
  double log_mean_;
  std::vector<double> cdf_;
  double tail_log_cdf_ = 0.0;
};

// Tables keyed by the bit pattern of the mean; shared across threads.
std::shared_ptr<const PoissonTable> poisson_table(double mean) {
  static std::mutex mutex;
  static std::map<std::uint64_t, std::shared_ptr<const PoissonTable>> cache;
  const auto key = std::bit_cast<std::uint64_t>(mean);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto table = std::make_shared<const PoissonTable>(mean);
  std::lock_guard lock(mutex);
  if (cache.size() > 4096) cache.clear();
  return cache.emplace(key, std::move(table)).first->second;
}

// Binomial(m, 1/2) CDF rows for m <= kSmallTrials, built once.
constexpr std::int64_t kSmallTrials = 512;

class BinomialHalfTables {
 public:
  BinomialHalfTables() : offsets_(kSmallTrials + 2, 0) {
    for (std::int64_t m = 0; m <= kSmallTrials; ++m)
      offsets_[m + 1] = offsets_[m] + static_cast<std::size_t>(m + 1);
    cdf_.resize(offsets_.back());
    for (std::int64_t m = 0; m <= kSmallTrials; ++m) {
      double acc = 0.0;
      for (std::int64_t a = 0; a <= m; ++a) {
        acc += std::exp(log_pmf(m, a));
        cdf_[offsets_[m] + a] = a == m ? 1.0 : std::min(acc, 1.0);
      }
    }
  }

  std::span<const double> row(std::int64_t m) const {
    return {cdf_.data() + offsets_[m], static_cast<std::size_t>(m + 1)};
  }

  static double log_pmf(std::int64_t m, std::int64_t a) {
    return std::lgamma(static_cast<double>(m) + 1.0) - std::lgamma(static_cast<double>(a) + 1.0) -
           std::lgamma(static_cast<double>(m - a) + 1.0) -
           static_cast<double>(m) * std::numbers::ln2;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<double> cdf_;
};

const BinomialHalfTables& binomial_tables() {
  static const BinomialHalfTables tables;
  return tables;
}

// Window [lo, m] outside which the Binomial(m, 1/2) mass below is < 1e-30.
std::int64_t binomial_window_low(std::int64_t m) {
  const double sd = 0.5 * std::sqrt(static_cast<double>(m));
  return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(0.5 * m - 12.0 * sd - 2.0)));
}

// Snaps values within 1e-9 (relative) of an integer onto it.
bool snap_integer(double value, double& snapped) {
  const double nearest = std::round(value);
  if (std::abs(value - nearest) <= 1e-9 * std::max(1.0, std::abs(value))) {
    snapped = nearest;
    return true;
  }
  snapped = value;
  return false;
}

// Largest integer strictly below `threshold` (after lattice snapping).
std::int64_t largest_below(double threshold) {
  constexpr double kHuge = 0x1p62;
  if (threshold >= kHuge) return static_cast<std::int64_t>(kHuge);
  double snapped;
  if (snap_integer(threshold, snapped)) return static_cast<std::int64_t>(snapped) - 1;
  return static_cast<std::int64_t>(std::floor(threshold));
}

std::int64_t conditioning_count(std::size_t level, double delta, double y) {
  const double m = std::sqrt(delta) * y + std::ldexp(delta, static_cast<int>(level));
  double snapped;
  if (!snap_integer(m, snapped) || snapped < 0)
    throw std::domain_error("conditioning value is off the lattice (sqrt(delta) y + 2^q delta = " +
                            std::to_string(m) + ")");
  return static_cast<std::int64_t>(snapped);
}

void check_probability(double t) {
  if (!(t > 0.0 && t < 1.0)) throw std::domain_error("quantile argument must lie in (0, 1)");
}

}  // namespace

std::int64_t poisson_quantile_count(double mean, double t) {
  if (!(mean > 0.0)) throw std::domain_error("Poisson mean must be positive");
  return poisson_table(mean)->quantile(t);
}

double binomial_half_cdf(std::int64_t trials, std::int64_t successes) {
  if (trials < 0) throw std::domain_error("trials must be non-negative");
  if (successes < 0) return 0.0;
  if (successes >= trials) return 1.0;
  if (trials <= kSmallTrials) return binomial_tables().row(trials)[successes];
  double acc = 0.0;
  for (std::int64_t a = binomial_window_low(trials); a <= successes; ++a)
    acc += std::exp(BinomialHalfTables::log_pmf(trials, a));
  return std::min(acc, 1.0);
}

std::int64_t binomial_half_quantile_count(std::int64_t trials, double t) {
  if (trials < 0) throw std::domain_error("trials must be non-negative");
  if (trials == 0) return 0;
  if (trials <= kSmallTrials) {
    const auto row = binomial_tables().row(trials);
    const auto it = std::upper_bound(row.begin(), row.end(), t);
    return it == row.end() ? trials : it - row.begin();
  }
  double acc = 0.0;
  for (std::int64_t a = binomial_window_low(trials); a < trials; ++a) {
    acc += std::exp(BinomialHalfTables::log_pmf(trials, a));
    if (acc > t) return a;
  }
  return trials;
}

double poisson_cdf_standardized(std::size_t level, double delta, double x) {
  if (!(delta > 0.0)) throw std::domain_error("delta must be positive");
  const double mean = std::ldexp(delta, static_cast<int>(level));
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  const std::int64_t below = largest_below(std::sqrt(delta) * x + mean);
  if (below < 0) return 0.0;
  return poisson_table(mean)->cdf(below);
}

double quantile_G(std::size_t level, double delta, double t) {
  check_probability(t);
  const double mean = std::ldexp(delta, static_cast<int>(level));
  const auto c = poisson_quantile_count(mean, t);
  return (static_cast<double>(c) - mean) / std::sqrt(delta);
}

double conditional_cdf(std::size_t level, double delta, double x, double y) {
  if (level < 1) throw std::domain_error("conditional law needs level q >= 1");
  const std::int64_t m = conditioning_count(level, delta, y);
  // 2A - m < s  <=>  A < (s + m) / 2
  const double s = std::sqrt(delta) * x;
  double snapped;
  std::int64_t a_max;
  if (snap_integer(s, snapped)) {
    const auto sum = static_cast<std::int64_t>(snapped) + m;
    a_max = (sum % 2 == 0) ? sum / 2 - 1 : (sum - 1) / 2;
  } else {
    a_max = static_cast<std::int64_t>(std::floor(0.5 * (s + static_cast<double>(m))));
  }
  return binomial_half_cdf(m, a_max);
}

double conditional_quantile_G(std::size_t level, double delta, double t, double y) {
  check_probability(t);
  if (level < 1) throw std::domain_error("conditional law needs level q >= 1");
  const std::int64_t m = conditioning_count(level, delta, y);
  const auto a = binomial_half_quantile_count(m, t);
  return static_cast<double>(2 * a - m) / std::sqrt(delta);
}

double KmtTrace::u(std::size_t j, std::size_t k) const {
  return (static_cast<double>(counts[j][k - 1]) - std::ldexp(delta, static_cast<int>(j))) /
         std::sqrt(delta);
}

double KmtTrace::utilde(std::size_t q, std::size_t k) const {
  return static_cast<double>(splits[q - 1][k - 1]) / std::sqrt(delta);
}

namespace {

// 2^{-j/2}, the scale that standardizes a sum of 2^j unit-variance terms.
double inv_sqrt_pow2(std::size_t j) { return 1.0 / std::sqrt(std::ldexp(1.0, static_cast<int>(j))); }

// Phi clamped into the open unit interval required by the quantiles.
double open_unit_cdf(double x) {
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - 0x1.0p-53;
  return std::clamp(normal_cdf(x), lo, hi);
}

std::vector<std::int64_t> transform_counts(std::span<const double> normals, double delta,
                                           KmtTrace* trace) {
  const std::size_t n = normals.size();
  if (n < 2 || !std::has_single_bit(n))
    throw std::invalid_argument("increment count " + std::to_string(n) +
                                " is not a power of two >= 2; round the horizon up");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  const auto levels = static_cast<std::size_t>(std::countr_zero(n));
  const auto t = partial_sums(normals);

  std::vector<std::int64_t> out(n);
  out[0] = poisson_quantile_count(delta, open_unit_cdf(normals[0]));

  // first column: C_{j,1} for every level
  std::vector<std::int64_t> first_column(levels);
  for (std::size_t j = 0; j < levels; ++j) {
    const double standardized = block_sum(t, j, 1) * inv_sqrt_pow2(j);
    first_column[j] =
        poisson_quantile_count(std::ldexp(delta, static_cast<int>(j)), open_unit_cdf(standardized));
  }

  if (trace) {
    trace->delta = delta;
    trace->levels = levels;
    trace->first_count = out[0];
    trace->counts.assign(levels, {});
    trace->splits.assign(levels > 0 ? levels - 1 : 0, {});
  }

  // row j holds C_{j,k} for k = 1..n/2^j - 1 at index k - 1
  std::vector<std::int64_t> row{first_column[levels - 1]};
  std::vector<std::int64_t> next;
  if (trace) trace->counts[levels - 1] = row;
  for (std::size_t j = levels - 1; j >= 1; --j) {
    const double scale = inv_sqrt_pow2(j);
    next.assign((n >> (j - 1)) - 1, 0);
    next[0] = first_column[j - 1];
    std::vector<std::int64_t>* split_log = trace ? &trace->splits[j - 1] : nullptr;
    if (split_log) split_log->assign(row.size(), 0);
    for (std::size_t k = 1; k <= row.size(); ++k) {
      const std::int64_t m = row[k - 1];
      const double half_difference = block_sum(t, j - 1, 2 * k) - block_sum(t, j - 1, 2 * k + 1);
      const auto a = binomial_half_quantile_count(m, open_unit_cdf(scale * half_difference));
      next[2 * k - 1] = a;      // C_{j-1,2k}
      next[2 * k] = m - a;      // C_{j-1,2k+1}
      if (split_log) (*split_log)[k - 1] = 2 * a - m;
    }
    row.swap(next);
    if (trace) trace->counts[j - 1] = row;
  }

  for (std::size_t k = 1; k < n; ++k) out[k] = row[k - 1];
  return out;
}

DyadicIncrements standardize(std::span<const std::int64_t> counts, double delta) {
  DyadicIncrements result;
  result.delta = delta;
  result.values.resize(counts.size());
  const double root = std::sqrt(delta);
  for (std::size_t i = 0; i < counts.size(); ++i)
    result.values[i] = (static_cast<double>(counts[i]) - delta) / root;
  return result;
}

}  // namespace

std::vector<std::int64_t> kmt_increment_counts(std::span<const double> normals, double delta) {
  return transform_counts(normals, delta, nullptr);
}

DyadicIncrements kmt_transform(const DyadicIncrements& normals) {
  return standardize(transform_counts(normals.values, normals.delta, nullptr), normals.delta);
}

DyadicIncrements kmt_transform(const DyadicIncrements& normals, KmtTrace& trace) {
  return standardize(transform_counts(normals.values, normals.delta, &trace), normals.delta);
}

PairedNoise assemble_paired_paths(const DyadicIncrements& normals, const DyadicIncrements& poissons) {
  if (normals.values.size() != poissons.values.size())
    throw std::invalid_argument("paired paths: increment counts differ");
  if (normals.delta != poissons.delta) throw std::invalid_argument("paired paths: grid steps differ");
  const double delta = normals.delta;
  const double root = std::sqrt(delta);
  PairedNoise noise;
  noise.delta = delta;
  noise.poisson_path.resize(normals.values.size() + 1, 0.0);
  noise.wiener_path.resize(normals.values.size() + 1, 0.0);
  for (std::size_t i = 0; i < normals.values.size(); ++i) {
    const double raw = root * poissons.values[i] + delta;
    const double count = std::round(raw);
    if (count < 0 || std::abs(raw - count) > 1e-9 * std::max(1.0, count))
      throw std::invalid_argument("paired paths: Poisson increment " + std::to_string(i + 1) +
                                  " is off the lattice");
    noise.poisson_path[i + 1] = noise.poisson_path[i] + count;
    noise.wiener_path[i + 1] = noise.wiener_path[i] + root * normals.values[i] + delta;
  }
  return noise;
}

PairedNoise generate_paired_noise(std::size_t n, double delta, std::uint64_t seed,
                                  std::string channel) {
  Rng rng(seed);
  std::vector<double> normals(n);
  for (double& w : normals) w = rng.normal();
  const auto counts = transform_counts(normals, delta, nullptr);

  PairedNoise noise;
  noise.delta = delta;
  noise.channel = std::move(channel);
  noise.poisson_path.resize(n + 1, 0.0);
  noise.wiener_path.resize(n + 1, 0.0);
  const double root = std::sqrt(delta);
  for (std::size_t i = 0; i < n; ++i) {
    noise.poisson_path[i + 1] = noise.poisson_path[i] + static_cast<double>(counts[i]);
    noise.wiener_path[i + 1] = noise.wiener_path[i] + root * normals[i] + delta;
  }
  return noise;
}

}  // namespace crn
