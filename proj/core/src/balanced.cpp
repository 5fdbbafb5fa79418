#include "entity_sampler/balanced.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>

#include "entity_sampler/error.hpp"
#include "entity_sampler/rng.hpp"

namespace entity_sampler {

namespace {

void check_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string(name) + " must be in (0,1)");
}

double plan_formula(double epsilon, double delta, double eta, double entities, double a) {
  const double ee = epsilon * eta;
  const double log_e = std::log(entities);
  const double inner = log_e > 0.0 ? std::max(0.0, log_e * std::log(log_e / ee)) : 0.0;
  return a / (ee * ee) * (inner + std::log(1.0 / delta));
}

}  // namespace

BalancedPlan plan_sample_size(double epsilon, double delta, double eta,
                              std::optional<std::size_t> entity_count, double a) {
  check_open_unit(epsilon, "epsilon");
  check_open_unit(delta, "delta");
  check_open_unit(eta, "eta");
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("constant a must be positive");
  if (entity_count && *entity_count == 0) throw ConfigError("entity count must be positive");

  BalancedPlan plan;
  plan.epsilon = epsilon;
  plan.delta = delta;
  plan.eta = eta;
  plan.a = a;
  plan.entity_count_given = entity_count.has_value();
  plan.entity_count =
      entity_count ? *entity_count : static_cast<std::size_t>(std::ceil(1.0 / eta - 1e-12));
  plan.m_exact = plan_formula(epsilon, delta, eta, static_cast<double>(plan.entity_count), a);
  plan.m = static_cast<std::size_t>(std::max(1.0, std::ceil(plan.m_exact)));
  return plan;
}

double balanced_epsilon_for(std::size_t m, double delta, double eta, std::size_t entity_count,
                            double a) {
  const double target = static_cast<double>(m);
  const double e = static_cast<double>(entity_count);
  if (plan_formula(1.0, delta, eta, e, a) > target) return 1.0;
  double lo = 1e-12, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (plan_formula(mid, delta, eta, e, a) > target) lo = mid;
    else hi = mid;
  }
  return hi;
}

ProbabilityMap estimate_probs_balanced(const Dataset& data, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw ConfigError("balanced estimator needs m >= 1");
  if (data.empty()) throw DomainError("empty dataset");
  const std::size_t n = data.size();
  const std::size_t classes = data.content_class_count();

  std::vector<std::size_t> counts(classes, 0);
  Rng rng(seed);
  if (m <= n) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t t = 0; t < m; ++t) ++counts[data.content_class_of(pick(rng))];
  } else {
    std::vector<std::size_t> sizes(classes, 0);
    for (std::size_t i = 0; i < n; ++i) ++sizes[data.content_class_of(i)];
    std::size_t left_draws = m;
    std::size_t left_records = n;
    for (std::size_t c = 0; c < classes && left_draws > 0; ++c) {
      if (sizes[c] == left_records) {
        counts[c] = left_draws;
        break;
      }
      const double q = static_cast<double>(sizes[c]) / static_cast<double>(left_records);
      std::binomial_distribution<std::size_t> bin(left_draws, q);
      counts[c] = bin(rng);
      left_draws -= counts[c];
      left_records -= sizes[c];
    }
  }

  std::size_t min_count = SIZE_MAX;
  std::size_t distinct = 0;
  for (std::size_t c : counts) {
    if (c > 0) {
      min_count = std::min(min_count, c);
      ++distinct;
    }
  }
  const double md = static_cast<double>(m);
  std::vector<double> phat(n);
  std::vector<std::uint32_t> cluster(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = data.content_class_of(i);
    const std::size_t k = counts[c] > 0 ? counts[c] : min_count;
    phat[i] = static_cast<double>(k) / md;
    cluster[i] = c;
  }
  ProbabilityMap map(std::move(phat), "balanced", std::move(cluster));
  if (distinct == 1)
    map.warnings().push_back("balanced sample saw a single distinct value; the map is degenerate");
  return map;
}

FingerprintStats::FingerprintStats(std::size_t m, std::size_t r, std::vector<std::size_t> f)
    : m_(m), r_(r), f_(std::move(f)) {
  if (f_.empty()) f_.push_back(0);
  if (f_[0] != 0) throw ConfigError("fingerprint f_0 must be zero");
  std::size_t sum_f = 0, sum_if = 0;
  for (std::size_t i = 1; i < f_.size(); ++i) {
    sum_f += f_[i];
    sum_if += i * f_[i];
  }
  if (sum_f != r_)
    throw ConfigError("fingerprint sums to " + std::to_string(sum_f) + " values, expected r=" +
                      std::to_string(r_));
  if (sum_if != m_)
    throw ConfigError("fingerprint covers " + std::to_string(sum_if) + " draws, expected m=" +
                      std::to_string(m_));
}

FingerprintStats FingerprintStats::from_sample(std::span<const std::uint32_t> values) {
  std::unordered_map<std::uint32_t, std::size_t> counts;
  for (auto v : values) ++counts[v];
  std::vector<std::size_t> f(values.size() + 1, 0);
  for (const auto& [v, c] : counts) ++f[c];
  while (f.size() > 1 && f.back() == 0) f.pop_back();
  return FingerprintStats(values.size(), counts.size(), std::move(f));
}

GoodmanResult goodman_estimate(const FingerprintStats& stats, std::size_t n,
                               double magnitude_limit) {
  const std::size_t m = stats.m();
  if (m < 1 || m >= n)
    throw DomainError("Goodman estimator needs 1 <= m <= n-1 (m=" + std::to_string(m) +
                      ", n=" + std::to_string(n) + ")");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double base = std::lgamma(nd - md) + std::lgamma(md + 1.0);

  std::vector<double> terms;
  for (std::size_t i = 1; i < stats.fingerprint().size(); ++i) {
    const std::size_t fi = stats.f(i);
    if (fi == 0) continue;
    const double id = static_cast<double>(i);
    // (n-m+i-1)! = Γ(n-m+i), (m-i)! = Γ(m-i+1)
    const double log_coef = std::lgamma(nd - md + id) + std::lgamma(md - id + 1.0) - base;
    const double mag = std::exp(log_coef) * static_cast<double>(fi);
    terms.push_back(i % 2 == 1 ? mag : -mag);
  }
  std::sort(terms.begin(), terms.end(),
            [](double x, double y) { return std::abs(x) > std::abs(y); });

  GoodmanResult out;
  double sum = 0.0;
  for (double t : terms) {
    sum += t;
    out.max_term = std::max(out.max_term, std::abs(t));
  }
  out.value = static_cast<double>(stats.r()) + sum;
  out.unstable = !std::isfinite(out.value) || out.max_term > magnitude_limit;
  return out;
}

double eta_lower_bound(const FingerprintStats& stats, std::size_t n,
                       std::span<const double> c_values) {
  if (stats.r() < 2) throw DomainError("eta bound needs at least two distinct values");
  if (c_values.empty()) throw ConfigError("eta bound needs the per-value sample fractions");
  const double e_hat = goodman_estimate(stats, n).value;
  if (!(e_hat > 1.0)) throw DomainError("eta bound undefined for an entity estimate <= 1");

  const double k = static_cast<double>(c_values.size());
  const double mean = std::accumulate(c_values.begin(), c_values.end(), 0.0) / k;
  double ss = 0.0;
  for (double c : c_values) ss += (c - mean) * (c - mean);
  const double sigma = std::sqrt(ss / k);

  const double inv = 1.0 / e_hat;
  const double bound = inv - (1.0 - inv) * sigma * std::sqrt(2.0 * static_cast<double>(stats.r()));
  return std::max(bound, 1.0 / static_cast<double>(n));
}

EtaEstimate estimate_eta(const Dataset& data, std::size_t m, std::uint64_t seed) {
  const std::size_t n = data.size();
  if (m < 1 || m >= n) throw ConfigError("eta estimation needs 1 <= m < n");
  // Partial Fisher-Yates: the first m slots are a uniform m-subset.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<std::uint32_t> values(m);
  for (std::size_t i = 0; i < m; ++i) values[i] = data.content_class_of(idx[i]);

  EtaEstimate out;
  out.stats = FingerprintStats::from_sample(values);
  out.entities = goodman_estimate(out.stats, n);

  std::unordered_map<std::uint32_t, std::size_t> counts;
  for (auto v : values) ++counts[v];
  std::vector<std::pair<std::uint32_t, std::size_t>> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [v, c] : sorted)
    out.c_values.push_back(static_cast<double>(c) / static_cast<double>(m));
  out.eta_bound = eta_lower_bound(out.stats, n, out.c_values);
  return out;
}

}  // namespace entity_sampler
