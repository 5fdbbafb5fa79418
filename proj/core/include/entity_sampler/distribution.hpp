#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace entity_sampler {

// A finite distribution over string labels. Masses are nonnegative and sum
// to one within 1e-9; violations are rejected at construction.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;
  explicit DiscreteDistribution(std::vector<std::pair<std::string, double>> masses);

  static DiscreteDistribution uniform(std::span<const std::string> labels);

  // Normalizes nonnegative weights (sum > 0) over the given labels.
  static DiscreteDistribution from_weights(std::span<const std::string> labels,
                                           std::span<const double> weights);

  std::size_t size() const noexcept { return entries_.size(); }
  double mass(const std::string& label) const;  // 0 when absent

  // Sorted by label.
  const std::vector<std::pair<std::string, double>>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

// sup_A |P(A) - Q(A)|, computed as half the L1 distance over the union of
// the supports.
double tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

// Dense variant for distributions over the same index set.
double tv_distance(std::span<const double> p, std::span<const double> q);

// TV distance from `p` (dense, sums to 1) to the uniform distribution on its indices.
double tv_to_uniform(std::span<const double> p);

// |real - est| / |real|; DomainError when real == 0.
double relative_error(double real_avg, double est_avg);

// Normalized counts; DomainError for an empty sample.
DiscreteDistribution empirical_distribution(std::span<const std::string> sample);

}  // namespace entity_sampler
