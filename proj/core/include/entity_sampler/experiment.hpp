#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entity_sampler/dataset.hpp"

namespace entity_sampler {

enum class DupKind { kTpch, kUniform, kArbitrary };

// Number of extra copies given to a duplicated record.
struct DupProfile {
  DupKind kind = DupKind::kTpch;
  std::size_t max_copies = 3;  // uniform and arbitrary draw from 1..max_copies

  // P[copies = c] for c = 1..max_copies (index c-1). Arbitrary profiles are
  // a seeded random categorical.
  std::vector<double> copy_probs(std::uint64_t seed) const;
};

DupKind parse_dup_kind(const std::string& name);
std::string to_string(DupKind kind);

// Each record is selected independently with probability `rate`; a selected
// record gets extra copies per the profile, appended after the originals.
// Copies keep their entity, so the entity table stays exact.
Dataset inject_duplicates(const Dataset& data, double rate, const DupProfile& profile,
                          std::uint64_t seed);

enum class Method { kBalanced, kLsh, kGmm };
Method parse_method(const std::string& name);
std::string to_string(Method m);

struct ExperimentSpec {
  std::string dataset;  // informational; the caller loads the data
  Method method = Method::kBalanced;
  std::vector<double> fractions;  // sample size m = p = fraction * clean size
  std::vector<double> dup_rates;
  std::size_t repeats = 100;
  std::uint64_t seed = 1;
  DupProfile profile;
  std::size_t threads = 1;

  // Bound columns use this confidence, as in the reported experiments.
  double bound_delta = 0.9;
  double a = 1.0;

  // lsh
  double lambda = 0.2;
  double lsh_delta = 0.1;
  double mu_radius = 0.2;
  std::size_t k_min = 1;
  std::size_t k_max = 8;
  bool proportional_split = false;

  // gmm
  std::size_t gmm_k = 2;
  std::size_t gmm_iterations = 100;
  double gmm_tol = 1e-6;
  double c_prime = 1.0;

  // Validates ranges; throws ConfigError.
  void validate() const;
};

ExperimentSpec parse_experiment_json(const std::string& text);
std::string experiment_to_json(const ExperimentSpec& spec);

struct CellResult {
  double dup_rate = 0.0;
  double fraction = 0.0;
  std::size_t m = 0;
  std::size_t ok_repeats = 0;
  double mean_error = 0.0;
  double stderr_error = 0.0;
  double mean_naive_error = 0.0;  // plain uniform record sample, no rejection
  double mean_tv = 0.0;           // induced distribution vs uniform over entities
  double mean_acceptance = 0.0;
  double mean_trials_per_accept = 0.0;
  double mean_bound = 0.0;
  double seconds = 0.0;
  std::vector<std::string> errors;  // distinct failure messages
  std::size_t failures = 0;
};

struct SampleReport {
  ExperimentSpec spec;
  std::size_t clean_size = 0;
  double clean_mean = 0.0;
  std::vector<CellResult> cells;  // dup-major, then fraction
  double seconds = 0.0;

  const CellResult& cell(std::size_t dup_index, std::size_t fraction_index) const {
    return cells[dup_index * spec.fractions.size() + fraction_index];
  }
  std::size_t total_failures() const;
};

// For each (dup rate, repeat): inject once, then for each fraction estimate,
// sample and score the sample mean against the clean mean. Work units run on
// spec.threads threads; seeds depend only on (seed, dup, fraction, repeat).
SampleReport run_experiment(const Dataset& clean, const ExperimentSpec& spec);

}  // namespace entity_sampler
