#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "entity_sampler/dataset.hpp"
#include "entity_sampler/probability_map.hpp"

namespace entity_sampler {

// k spherical Gaussians in d dimensions: weights sum to 1, variances > 0,
// means row-major (k x d).
struct MixtureModel {
  std::size_t k = 0;
  std::size_t d = 0;
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;

  std::span<const double> mean(std::size_t i) const { return {means.data() + i * d, d}; }
  // Throws ConfigError when the invariants do not hold.
  void validate() const;

  std::string to_json() const;
  static MixtureModel from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static MixtureModel load(const std::filesystem::path& path);
};

double gmm_log_density(const MixtureModel& model, std::span<const double> x);
double gmm_density(const MixtureModel& model, std::span<const double> x);

struct EmOptions {
  std::size_t iterations = 100;  // T
  double tol = 1e-6;             // stop when the total parameter change is below this
  std::size_t max_restarts = 8;
  std::size_t init_subsample = 1000;
  double collapse_threshold = 1e-8;
};

struct EmResult {
  MixtureModel model;
  // Log-likelihood of the parameters entering each E-step, then of the final model.
  std::vector<double> log_likelihood;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  bool converged = false;  // stopped on tol rather than the iteration cap
  std::vector<std::string> warnings;
};

// Spherical EM on row-major points (n x d). Initial means are drawn by
// k-means++ on a subsample, with uniform weights and the pooled variance
// around those means. A component whose weight or variance falls below
// collapse_threshold triggers a restart from a new seed; ConvergenceError
// after max_restarts.
EmResult em_fit(std::span<const double> points, std::size_t d, std::size_t k,
                const EmOptions& opts, std::uint64_t seed);
EmResult em_fit(const Dataset& data, std::size_t k, const EmOptions& opts, std::uint64_t seed);

// p̂(x) = N̂(x) / Σ_y N̂(y) over the records. The normalization cancels in
// the sampler's ratio floor/p̂ and keeps p̂ in (0,1]. DomainError when a
// log-density is below -700 (rescale the data).
ProbabilityMap estimate_probs_gmm(const Dataset& data, const MixtureModel& model);

struct GmmPlan {
  double epsilon = 0.0;
  double delta = 0.0;
  double tau = 0.0;
  double eta_min = 0.0;
  std::size_t d = 0;
  std::size_t k = 0;
  double c_prime = 1.0;
  double c_t = 1.0;
  std::size_t T = 0;
  double m_exact = 0.0;
  std::size_t m = 0;
};

// T = ceil(c_T·ln(1/(τε))) (at least 1) and
// m = ceil(C'·d^3·(ln(k^2 T) + ln(1/δ)) / (η_min τ^2 ε^2)).
GmmPlan plan_gmm(double epsilon, double delta, double tau, double eta_min, std::size_t d,
                 std::size_t k, double c_prime = 1.0, double c_t = 1.0);

// Component pairs closer than max(σ_i, σ_j)·sqrt(ln(ρ_σ/η_min)).
std::vector<std::pair<std::size_t, std::size_t>> separation_violations(const MixtureModel& model);

}  // namespace entity_sampler
