#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "entity_sampler/clustering.hpp"
#include "entity_sampler/dataset.hpp"
#include "entity_sampler/lsh.hpp"
#include "entity_sampler/probability_map.hpp"
#include "entity_sampler/ssc.hpp"

namespace entity_sampler {

struct KRange {
  std::size_t k_min = 1;
  std::size_t k_max = std::numeric_limits<std::size_t>::max();
};

// Builds the same-cluster oracle for one block from its record indices.
using OracleFactory = std::function<PairOracle(std::span<const std::size_t> rows)>;

struct LshPipelineOptions {
  double mu_radius = 1.0;          // prefilter radius of regularized k-means
  KRange k_range;                  // used for blocks without an entry in per_block
  std::vector<KRange> per_block;   // optional, indexed by block
  std::size_t budget = 0;          // total oracle pair budget m
  bool proportional_split = false; // else equal split over clustered blocks
  double mu_weight = 0.5;
  RegularizedOptions clustering;
};

struct BlockReport {
  std::size_t block = 0;
  std::size_t size = 0;
  std::size_t survivors = 0;  // points left after the prefilter
  std::size_t k_selected = 0;
  std::size_t candidates = 0;
  std::size_t queries = 0;
  double loss = 0.0;
  bool exhaustive = false;
  bool partial = false;
};

struct LshEstimate {
  ProbabilityMap map;
  std::vector<BlockReport> blocks;  // one per block of size >= 2
  std::size_t total_queries = 0;
  std::vector<std::string> warnings;
};

// Per block of size >= 2: regularized k-means for every k in the block's
// range (clamped to [max(k_min,1), min(k_max, survivors)]), SSC selection
// using the block's share of the budget, then p̂(record) = |cluster|/n with
// garbage records as singleton clusters. Blocks whose pair count fits in
// their share are scored on all pairs. Per-block seeds derive from
// (seed, block), so block order does not affect the result.
LshEstimate estimate_probs_lsh(const Dataset& data, const Blocking& blocking,
                               const LshPipelineOptions& opts, const OracleFactory& oracle,
                               std::uint64_t seed);

// Oracle factory answering from the dataset's ground-truth entities.
OracleFactory labels_oracle_factory(const Dataset& data);

}  // namespace entity_sampler
