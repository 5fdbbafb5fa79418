#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "entity_sampler/dataset.hpp"
#include "entity_sampler/gmm.hpp"

namespace entity_sampler::synthetic {

// n distinct records with features {key, value}; values are uniform
// integers in [value_min, value_max]. Stand-in for a clean fact table.
Dataset table(std::size_t n, std::uint64_t seed, double value_min = 400.0,
              double value_max = 1e6);

// Entity e appears freq[e] times with feature {e} and a value drawn once
// per entity, uniform in [0, 1000).
Dataset with_frequencies(std::span<const std::size_t> freq, std::uint64_t seed);

struct PlantedInstance {
  std::vector<double> points;   // row-major, n x d
  std::size_t d = 0;
  std::vector<std::uint32_t> truth;  // cluster id; singletons get their own id
  std::size_t clusters = 0;          // non-singleton clusters (ids 0..clusters-1)
};

// `per_cluster` points uniform in each unit ball around `centers`, plus
// `singletons` points at distance >= far_gap from every other point.
PlantedInstance planted_balls(std::span<const double> centers, std::size_t d,
                              std::size_t per_cluster, std::size_t singletons, double far_gap,
                              std::uint64_t seed);

// Uniform point in the unit ball of dimension d.
std::vector<double> unit_ball_point(std::size_t d, std::uint64_t seed);

struct XiGmmGrid {
  Dataset data;
  std::vector<double> normalized_density;  // N(e)/Σ N over entities
  double realized_xi = 0.0;                // max_e |prob(e) - Ñ(e)| / Ñ(e)
};

// Entities on a 2-D grid of the given spacing within `radius` of some mean
// of `model`; entity e gets round(min_freq·N(e)/N_min·(1+u_e)) records with
// u_e uniform in [-jitter, jitter].
XiGmmGrid xi_gmm_grid(const MixtureModel& model, double spacing, double radius,
                      std::size_t min_freq, double jitter, std::uint64_t seed);

// Random lowercase word sequence of `words` words.
std::string random_text(std::size_t words, std::uint64_t seed);

// Copy of `text` with `edits` single-character substitutions.
std::string perturb_text(const std::string& text, std::size_t edits, std::uint64_t seed);

// Labelled text corpus: `entities` base texts, entity e repeated 1 + extra
// copies where extra follows copy_probs (index = extra copies). Duplicates
// are perturbed with up to max_edits substitutions. Values are per entity.
Dataset text_corpus(std::size_t entities, std::span<const double> copy_probs,
                    std::size_t words, std::size_t max_edits, std::uint64_t seed);

}  // namespace entity_sampler::synthetic
