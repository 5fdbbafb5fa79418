#include "entity_sampler/rejection_sampler.hpp"

#include <cmath>
#include <string>

#include "entity_sampler/error.hpp"
#include "entity_sampler/rng.hpp"

namespace entity_sampler {

namespace {

void check_inputs(const Dataset& data, const ProbabilityMap& phat) {
  if (data.empty()) throw DomainError("empty dataset");
  phat.check_covers(data);
  if (!(phat.floor() > 0.0)) throw CoverageError("probability map floor must be positive");
}

}  // namespace

SampleResult sample_clean(const Dataset& data, const ProbabilityMap& phat, std::size_t p,
                          std::uint64_t seed, const SamplerOptions& opts) {
  check_inputs(data, phat);
  if (p == 0) throw ConfigError("sample size p must be at least 1");
  const double cap_d = opts.max_trials_factor * static_cast<double>(p);
  const std::size_t cap = cap_d >= 1.8e19 ? SIZE_MAX : static_cast<std::size_t>(cap_d);

  const std::size_t n = data.size();
  const double floor = phat.floor();
  const auto values = phat.values();

  SampleResult out;
  out.accepted.reserve(p);
  out.per_entity_counts.assign(data.entity_count(), 0);
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  while (out.accepted.size() < p) {
    if (out.trials >= cap)
      throw ConvergenceError("rejection sampler exceeded " + std::to_string(cap) +
                             " trials for " + std::to_string(p) + " accepts");
    ++out.trials;
    const std::size_t v = pick(rng);
    const double a = coin(rng);
    if (a < floor / values[v]) {
      out.accepted.push_back(v);
      ++out.per_entity_counts[data.entity_of(v)];
    }
  }
  return out;
}

std::vector<double> induced_entity_masses(const Dataset& data, const ProbabilityMap& phat) {
  check_inputs(data, phat);
  const double floor = phat.floor();
  std::vector<double> mass(data.entity_count(), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) mass[data.entity_of(i)] += floor / phat[i];
  double total = 0.0;
  for (double m : mass) total += m;
  for (double& m : mass) m /= total;
  return mass;
}

DiscreteDistribution exact_induced_distribution(const Dataset& data, const ProbabilityMap& phat) {
  const auto mass = induced_entity_masses(data, phat);
  std::vector<std::pair<std::string, double>> entries;
  entries.reserve(mass.size());
  double total = 0.0;
  for (double m : mass) total += m;
  for (std::size_t e = 0; e < mass.size(); ++e)
    entries.emplace_back(data.entity_name(static_cast<std::uint32_t>(e)), mass[e] / total);
  return DiscreteDistribution(std::move(entries));
}

double induced_tv_to_uniform(const Dataset& data, const ProbabilityMap& phat) {
  return tv_to_uniform(induced_entity_masses(data, phat));
}

double expected_trials_per_accept(const Dataset& data, const ProbabilityMap& phat) {
  check_inputs(data, phat);
  const double floor = phat.floor();
  double accept = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) accept += floor / phat[i];
  accept /= static_cast<double>(data.size());
  return 1.0 / accept;
}

}  // namespace entity_sampler
