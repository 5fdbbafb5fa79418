#include "entity_sampler/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "entity_sampler/error.hpp"

namespace entity_sampler {

DiscreteDistribution::DiscreteDistribution(std::vector<std::pair<std::string, double>> masses)
    : entries_(std::move(masses)) {
  std::sort(entries_.begin(), entries_.end());
  double total = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0 && entries_[i].first == entries_[i - 1].first)
      throw ConfigError("duplicate label '" + entries_[i].first + "' in distribution");
    if (!(entries_[i].second >= 0.0) || !std::isfinite(entries_[i].second))
      throw ConfigError("negative or non-finite mass for '" + entries_[i].first + "'");
    total += entries_[i].second;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ConfigError("distribution masses sum to " + std::to_string(total));
}

DiscreteDistribution DiscreteDistribution::uniform(std::span<const std::string> labels) {
  if (labels.empty()) throw DomainError("uniform distribution over an empty support");
  std::vector<double> w(labels.size(), 1.0);
  return from_weights(labels, w);
}

DiscreteDistribution DiscreteDistribution::from_weights(std::span<const std::string> labels,
                                                        std::span<const double> weights) {
  if (labels.size() != weights.size()) throw ConfigError("labels and weights differ in length");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("negative or non-finite weight");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("weights sum to zero");
  std::vector<std::pair<std::string, double>> m;
  m.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) m.emplace_back(labels[i], weights[i] / total);
  return DiscreteDistribution(std::move(m));
}

double DiscreteDistribution::mass(const std::string& label) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), label,
                             [](const auto& e, const std::string& l) { return e.first < l; });
  return (it != entries_.end() && it->first == label) ? it->second : 0.0;
}

double tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  const auto& a = p.entries();
  const auto& b = q.entries();
  double l1 = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      l1 += a[i++].second;
    } else if (i == a.size() || b[j].first < a[i].first) {
      l1 += b[j++].second;
    } else {
      l1 += std::abs(a[i++].second - b[j++].second);
    }
  }
  return std::min(1.0, 0.5 * l1);
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ConfigError("dense TV: size mismatch");
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(p[i] - q[i]);
  return std::min(1.0, 0.5 * l1);
}

double tv_to_uniform(std::span<const double> p) {
  if (p.empty()) throw DomainError("TV to uniform over an empty support");
  const double u = 1.0 / static_cast<double>(p.size());
  double l1 = 0.0;
  for (double x : p) l1 += std::abs(x - u);
  return std::min(1.0, 0.5 * l1);
}

double relative_error(double real_avg, double est_avg) {
  if (real_avg == 0.0) throw DomainError("relative error undefined for a zero reference average");
  return std::abs(real_avg - est_avg) / std::abs(real_avg);
}

DiscreteDistribution empirical_distribution(std::span<const std::string> sample) {
  if (sample.empty()) throw DomainError("empirical distribution of an empty sample");
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sample) ++counts[s];
  std::vector<std::pair<std::string, double>> m;
  m.reserve(counts.size());
  const double n = static_cast<double>(sample.size());
  for (const auto& [k, c] : counts) m.emplace_back(k, static_cast<double>(c) / n);
  return DiscreteDistribution(std::move(m));
}

}  // namespace entity_sampler
