#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "entity_sampler/dataset.hpp"
#include "entity_sampler/probability_map.hpp"

namespace entity_sampler {

// Sample size for estimating the probabilities of an eta-balanced dataset:
//   m = ceil( a/(eps^2 eta^2) * (ln|E| * ln(ln|E|/(eps*eta)) + ln(1/delta)) ).
// Without |E|, ceil(1/eta) is used since eta-balance implies |E| <= 1/eta.
struct BalancedPlan {
  double epsilon = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double a = 1.0;
  std::size_t entity_count = 0;  // |E| used in the formula
  bool entity_count_given = false;
  double m_exact = 0.0;  // before rounding up
  std::size_t m = 0;
};

BalancedPlan plan_sample_size(double epsilon, double delta, double eta,
                              std::optional<std::size_t> entity_count = std::nullopt,
                              double a = 1.0);

// Inverse of plan_sample_size in epsilon: the smallest epsilon whose plan
// fits in m draws (bisection on the monotone formula). Returns 1 when even
// epsilon = 1 needs more than m.
double balanced_epsilon_for(std::size_t m, double delta, double eta, std::size_t entity_count,
                            double a = 1.0);

// Draws m records uniformly with replacement and sets p̂ to the sample
// frequency of each record's content class. Classes never drawn share the
// smallest observed frequency. Ground-truth labels are not used.
// When m > n the per-class counts are drawn as one multinomial instead of
// m individual draws; the distribution of the result is the same.
ProbabilityMap estimate_probs_balanced(const Dataset& data, std::size_t m, std::uint64_t seed);

// Frequency fingerprint of a sample: f[i] = number of values seen exactly i
// times, for i = 1..m (f[0] is unused and zero).
class FingerprintStats {
 public:
  FingerprintStats() = default;
  // Throws ConfigError unless Σ f_i = r and Σ i·f_i = m.
  FingerprintStats(std::size_t m, std::size_t r, std::vector<std::size_t> f);

  // Fingerprint of a sample given as per-draw value ids.
  static FingerprintStats from_sample(std::span<const std::uint32_t> values);

  std::size_t m() const noexcept { return m_; }
  std::size_t r() const noexcept { return r_; }
  std::size_t f(std::size_t i) const noexcept { return i < f_.size() ? f_[i] : 0; }
  const std::vector<std::size_t>& fingerprint() const noexcept { return f_; }

 private:
  std::size_t m_ = 0;
  std::size_t r_ = 0;
  std::vector<std::size_t> f_;
};

struct GoodmanResult {
  double value = 0.0;
  double max_term = 0.0;  // largest |term| in the alternating sum
  bool unstable = false;  // max_term exceeded the magnitude limit
};

// Goodman's estimate of the number of distinct values in a population of
// size n from a without-replacement sample:
//   Ê = r + Σ_i (-1)^{i+1} (n-m+i-1)!(m-i)! / ((n-m-1)! m!) · f_i.
// Requires 1 <= m <= n-1. Factorial ratios are evaluated with lgamma.
GoodmanResult goodman_estimate(const FingerprintStats& stats, std::size_t n,
                               double magnitude_limit = 1e12);

// max(1/Ê - (1 - 1/Ê)·σ_c·sqrt(2r), 1/n), σ_c the population standard
// deviation of c_values. Requires r >= 2 and Ê > 1.
double eta_lower_bound(const FingerprintStats& stats, std::size_t n,
                       std::span<const double> c_values);

struct EtaEstimate {
  FingerprintStats stats;
  GoodmanResult entities;
  std::vector<double> c_values;  // per distinct value: count / m
  double eta_bound = 0.0;
};

// Draws m records without replacement (independent of the balanced sample),
// fingerprints their content classes and bounds eta from below.
EtaEstimate estimate_eta(const Dataset& data, std::size_t m, std::uint64_t seed);

}  // namespace entity_sampler
