#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "entity_sampler/clustering.hpp"
#include "entity_sampler/dataset.hpp"

namespace entity_sampler {

// Same-cluster oracle over local point indices: true iff the two points
// belong to the same target cluster.
using PairOracle = std::function<bool(std::size_t, std::size_t)>;

struct SscInstance {
  std::size_t n_points = 0;
  std::vector<Clustering> candidates;
  double mu_weight = 0.5;    // weight of the positive-pair loss
  std::size_t m_pairs = 1;   // target size of both S+ and S-
  PairOracle oracle;
};

struct SscOptions {
  // Use every unordered pair once instead of sampling.
  bool exhaustive = false;
  // Oracle answers used to estimate gamma = P[pair is negative] for the query cap.
  std::size_t gamma_window = 100;
  double nu = 1.0;
  // On reaching the query cap, score with the pairs collected so far instead
  // of throwing ConvergenceError.
  bool allow_partial = false;
};

struct SscResult {
  std::size_t index = 0;  // winner in candidates
  std::vector<double> loss, pl, nl;
  std::size_t queries = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double gamma_hat = 0.0;
  double query_cap = 0.0;  // 0 when no cap applied
  bool partial = false;
};

// Empirical loss minimization: pl = share of positive pairs the candidate
// separates, nl = share of negative pairs it joins, loss = μ·pl + (1-μ)·nl.
// Pairs are ordered (x, y), x != y, uniform with replacement. Ties go to
// the candidate with fewer clusters, then the earlier one. A side with no
// pairs contributes 0.
SscResult ssc_select(const SscInstance& inst, std::uint64_t seed, const SscOptions& opts = {});

struct PairLoss {
  double pl = 0.0;
  double nl = 0.0;
  double loss = 0.0;
};

// Loss of `c` against target labels over all unordered pairs.
PairLoss true_pair_loss(const Clustering& c, std::span<const std::uint32_t> target,
                        double mu_weight = 0.5);

// Per-side pair count m >= a·(ln s + ln(2/δ))/ε² for choosing among s candidates.
std::size_t ssc_pair_budget(std::size_t s, double epsilon, double delta, double a = 1.0);

// Oracle answering from ground-truth entities of rows[i], rows[j].
PairOracle labels_oracle(const Dataset& data, std::span<const std::size_t> rows);

}  // namespace entity_sampler
