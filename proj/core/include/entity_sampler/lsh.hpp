#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "entity_sampler/dataset.hpp"

namespace entity_sampler {

enum class HashFamily { kMinHash, kHyperplane };

// Banded LSH parameters. r rows per band, s bands; 1/(2λ) < r < 1/(-ln(1-λ))
// and s = ceil(2.2 ln(1/δ)).
struct LshConfig {
  double lambda = 0.2;
  double delta = 0.1;
  std::size_t r = 3;
  std::size_t s = 6;
  HashFamily family = HashFamily::kMinHash;
};

// Smallest admissible r and the matching s. ConfigError when the open
// interval for r contains no integer.
LshConfig choose_bands_rows(double lambda, double delta,
                            HashFamily family = HashFamily::kMinHash);

// Partition of record indices. Blocks are sorted by their smallest member
// and members are ascending.
struct Blocking {
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::uint32_t> block_of;  // record -> block

  std::size_t q() const noexcept { return blocks.size(); }
  // block size -> number of blocks of that size
  std::map<std::size_t, std::size_t> size_histogram() const;
};

Blocking blocking_from_assignment(std::span<const std::uint32_t> assignment);

// r·s hash functions drawn from `seed`; records sharing any band signature
// end up in one block (union-find over collisions). MinHash needs token
// sets, hyperplane needs feature vectors.
Blocking lsh_partition(const Dataset& data, const LshConfig& cfg, std::uint64_t seed);

// 1 - |a ∩ b| / |a ∪ b| for sorted unique token sets; 0 for two empty sets.
double jaccard_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

}  // namespace entity_sampler
