#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "entity_sampler/dataset.hpp"

namespace entity_sampler {

// Dense symmetric distance matrix over a set of points indexed 0..size-1.
class PairwiseDistances {
 public:
  PairwiseDistances() = default;
  explicit PairwiseDistances(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  // Euclidean distances between feature vectors, or Jaccard distances
  // between token sets when the dataset has no vectors, over `rows`.
  static PairwiseDistances from_records(const Dataset& data, std::span<const std::size_t> rows);
  // Euclidean distances between row-major points of dimension d.
  static PairwiseDistances euclidean(std::span<const double> points, std::size_t d);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = v;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

// k clusters C_1..C_k plus a garbage cluster C_{k+1}. Indices are local to
// the clustered point set. Clusters are sorted by smallest member, members
// ascending.
struct Clustering {
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> garbage;

  std::size_t k() const noexcept { return clusters.size(); }
  // Cluster id per point; garbage points get ids k, k+1, ... (one each).
  std::vector<std::uint32_t> labels(std::size_t n) const;
  // True when points i and j share a non-garbage cluster.
  static bool together(std::span<const std::uint32_t> labels, std::size_t i, std::size_t j) {
    return labels[i] == labels[j];
  }
};

// Canonical order (clusters by smallest member, members ascending).
void normalize(Clustering& c);

// Σ_C (1/|C|) Σ_{x<y in C} d(x,y)^2 over the non-garbage clusters. For
// Euclidean distances this is the within-cluster sum of squares.
double kmeans_cost(const PairwiseDistances& d, const Clustering& c);

// Exhaustive minimum-cost partition of `points` into exactly k nonempty
// clusters. Intended for small point sets.
Clustering brute_force_kmeans(const PairwiseDistances& d, std::span<const std::size_t> points,
                              std::size_t k);

struct LloydOptions {
  std::size_t restarts = 32;
  std::size_t max_iterations = 100;
};

// Kernel k-means on the distance matrix: k-means++ seeding, Lloyd
// iterations, then single-point (Hartigan) moves until no move lowers the
// cost. Best of `restarts` runs.
Clustering lloyd_kmeans(const PairwiseDistances& d, std::span<const std::size_t> points,
                        std::size_t k, std::uint64_t seed, const LloydOptions& opts = {});

struct RegularizedOptions {
  std::size_t brute_force_cap = 9;
  LloydOptions lloyd;
};

// Points with no other point within distance mu go to the garbage cluster;
// the rest are split into k clusters (exhaustively when at most
// brute_force_cap remain, else lloyd_kmeans). k is ignored when nothing
// remains; ConfigError when k is 0 or exceeds the remaining count.
Clustering regularized_kmeans(const PairwiseDistances& d, std::size_t k, double mu,
                              std::uint64_t seed, const RegularizedOptions& opts = {});

// Points surviving the prefilter (some other point within mu), ascending.
std::vector<std::size_t> prefilter_survivors(const PairwiseDistances& d, double mu);

}  // namespace entity_sampler
