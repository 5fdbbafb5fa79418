#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "entity_sampler/dataset.hpp"
#include "entity_sampler/distribution.hpp"
#include "entity_sampler/probability_map.hpp"

namespace entity_sampler {

struct SamplerOptions {
  // Cap on uniform draws, as a multiple of the requested sample size.
  double max_trials_factor = 1e4;
};

struct SampleResult {
  std::vector<std::size_t> accepted;         // record indices, size p, in draw order
  std::size_t trials = 0;                     // uniform draws attempted, >= p
  std::vector<std::size_t> per_entity_counts;  // indexed by Dataset::entity_of

  double acceptance_rate() const {
    return trials == 0 ? 0.0 : static_cast<double>(accepted.size()) / static_cast<double>(trials);
  }
  double trials_per_accept() const {
    return accepted.empty() ? 0.0 : static_cast<double>(trials) / static_cast<double>(accepted.size());
  }
};

// Draws records uniformly with replacement and accepts record v iff
// a < floor / p̂(v) for a ~ U[0,1), until p records are accepted.
// Throws ConvergenceError past max_trials_factor * p draws.
SampleResult sample_clean(const Dataset& data, const ProbabilityMap& phat, std::size_t p,
                          std::uint64_t seed, const SamplerOptions& opts = {});

// Closed-form entity distribution that sample_clean converges to, indexed
// by Dataset::entity_of: mass(e) ∝ Σ_{v in e} floor / p̂(v).
std::vector<double> induced_entity_masses(const Dataset& data, const ProbabilityMap& phat);

// Same as induced_entity_masses, labelled by entity name.
DiscreteDistribution exact_induced_distribution(const Dataset& data, const ProbabilityMap& phat);

// TV distance from the induced distribution to uniform over entities.
double induced_tv_to_uniform(const Dataset& data, const ProbabilityMap& phat);

// 1 / Σ_v (1/n)·floor/p̂(v); the mean number of draws per accepted record.
double expected_trials_per_accept(const Dataset& data, const ProbabilityMap& phat);

}  // namespace entity_sampler
