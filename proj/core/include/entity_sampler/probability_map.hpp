#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "entity_sampler/dataset.hpp"

namespace entity_sampler {

// Per-record estimated selection probability p̂ with provenance.
// Invariant: every p̂ is finite and in (0, 1]; floor() is their minimum.
class ProbabilityMap {
 public:
  ProbabilityMap() = default;
  ProbabilityMap(std::vector<double> phat, std::string source,
                 std::vector<std::uint32_t> cluster_ids = {});

  std::size_t size() const noexcept { return phat_.size(); }
  double operator[](std::size_t i) const { return phat_[i]; }
  std::span<const double> values() const noexcept { return phat_; }
  double floor() const noexcept { return floor_; }
  const std::string& source() const noexcept { return source_; }

  // Cluster of each record when the estimator produced one (lsh); empty otherwise.
  std::span<const std::uint32_t> cluster_ids() const noexcept { return clusters_; }
  bool has_clusters() const noexcept { return !clusters_.empty(); }

  std::vector<std::string>& warnings() noexcept { return warnings_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  // Throws CoverageError unless the map has one entry per record of `data`.
  void check_covers(const Dataset& data) const;

 private:
  std::vector<double> phat_;
  std::vector<std::uint32_t> clusters_;
  std::string source_;
  double floor_ = 0.0;
  std::vector<std::string> warnings_;
};

// p̂(record) = prob(entity(record)), from ground-truth entities.
ProbabilityMap exact_probability_map(const Dataset& data);

// Writes "# source=<tag>" then a header "record_id,phat[,cluster]".
void write_probability_csv(const std::filesystem::path& path, const Dataset& data,
                           const ProbabilityMap& map);

// Reads a file produced by write_probability_csv and aligns it with `data`
// by record id. Records of `data` without a row raise CoverageError.
ProbabilityMap read_probability_csv(const std::filesystem::path& path, const Dataset& data);

}  // namespace entity_sampler
