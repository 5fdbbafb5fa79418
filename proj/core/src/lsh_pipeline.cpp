#include "entity_sampler/lsh_pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "entity_sampler/error.hpp"
#include "entity_sampler/rng.hpp"

namespace entity_sampler {

namespace {

bool same_pair_relation(const Clustering& a, const Clustering& b, std::size_t n) {
  const auto la = a.labels(n);
  const auto lb = b.labels(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y)
      if ((la[x] == la[y]) != (lb[x] == lb[y])) return false;
  return true;
}

}  // namespace

LshEstimate estimate_probs_lsh(const Dataset& data, const Blocking& blocking,
                               const LshPipelineOptions& opts, const OracleFactory& oracle,
                               std::uint64_t seed) {
  const std::size_t n = data.size();
  if (n == 0) throw DomainError("empty dataset");
  if (blocking.block_of.size() != n) throw ConfigError("blocking does not match the dataset");
  if (!opts.per_block.empty() && opts.per_block.size() != blocking.q())
    throw ConfigError("per-block k ranges must have one entry per block");

  std::size_t clustered_records = 0, clustered_blocks = 0;
  for (const auto& b : blocking.blocks)
    if (b.size() >= 2) {
      clustered_records += b.size();
      ++clustered_blocks;
    }

  LshEstimate out;
  std::vector<std::uint32_t> cluster(n, UINT32_MAX);
  std::vector<std::size_t> cluster_size;
  auto new_cluster = [&](std::span<const std::size_t> members) {
    const auto id = static_cast<std::uint32_t>(cluster_size.size());
    cluster_size.push_back(members.size());
    for (auto r : members) cluster[r] = id;
  };

  for (std::size_t bi = 0; bi < blocking.q(); ++bi) {
    const auto& rows = blocking.blocks[bi];
    if (rows.size() < 2) {
      new_cluster(rows);
      continue;
    }
    BlockReport rep;
    rep.block = bi;
    rep.size = rows.size();

    const auto d = PairwiseDistances::from_records(data, rows);
    const std::size_t survivors = prefilter_survivors(d, opts.mu_radius).size();
    rep.survivors = survivors;

    Clustering chosen;
    if (survivors == 0) {
      chosen = regularized_kmeans(d, 0, opts.mu_radius, 0, opts.clustering);
    } else {
      const KRange kr = opts.per_block.empty() ? opts.k_range : opts.per_block[bi];
      const std::size_t k1 = std::max<std::size_t>(kr.k_min, 1);
      const std::size_t k2 = std::min(kr.k_max, survivors);
      if (k1 > k2)
        throw ConfigError("block " + std::to_string(bi) + ": empty k range [" +
                          std::to_string(k1) + ", " + std::to_string(k2) + "]");

      SscInstance inst;
      inst.n_points = rows.size();
      inst.mu_weight = opts.mu_weight;
      std::vector<std::size_t> ks;
      for (std::size_t k = k1; k <= k2; ++k) {
        inst.candidates.push_back(
            regularized_kmeans(d, k, opts.mu_radius, derive_seed(seed, {bi, k}), opts.clustering));
        ks.push_back(k);
      }
      rep.candidates = inst.candidates.size();

      bool all_same = true;
      for (std::size_t c = 1; c < inst.candidates.size() && all_same; ++c)
        all_same = same_pair_relation(inst.candidates[0], inst.candidates[c], rows.size());

      if (all_same) {
        chosen = inst.candidates.front();
        rep.k_selected = ks.front();
      } else {
        double share = static_cast<double>(opts.budget) / static_cast<double>(clustered_blocks);
        if (opts.proportional_split)
          share = static_cast<double>(opts.budget) * static_cast<double>(rows.size()) /
                  static_cast<double>(clustered_records);
        const std::size_t block_budget = std::max<std::size_t>(1, static_cast<std::size_t>(share));
        const std::size_t all_pairs = rows.size() * (rows.size() - 1) / 2;

        SscOptions so;
        so.exhaustive = all_pairs <= block_budget;
        so.allow_partial = true;
        inst.m_pairs = std::max<std::size_t>(1, block_budget / 2);
        inst.oracle = oracle(rows);
        const auto res = ssc_select(inst, derive_seed(seed, {bi, 0xC0FFEEULL}), so);
        chosen = inst.candidates[res.index];
        rep.k_selected = ks[res.index];
        rep.queries = res.queries;
        rep.loss = res.loss[res.index];
        rep.exhaustive = so.exhaustive;
        rep.partial = res.partial;
        if (res.partial)
          out.warnings.push_back("block " + std::to_string(bi) +
                                 ": oracle query cap reached; scored on " +
                                 std::to_string(res.positives) + " positive and " +
                                 std::to_string(res.negatives) + " negative pairs");
      }
    }

    for (const auto& c : chosen.clusters) {
      std::vector<std::size_t> members;
      members.reserve(c.size());
      for (auto local : c) members.push_back(rows[local]);
      new_cluster(members);
    }
    for (auto local : chosen.garbage) {
      const std::size_t r = rows[local];
      new_cluster(std::span<const std::size_t>(&r, 1));
    }
    out.total_queries += rep.queries;
    out.blocks.push_back(rep);
  }

  std::vector<double> phat(n);
  for (std::size_t i = 0; i < n; ++i)
    phat[i] = static_cast<double>(cluster_size[cluster[i]]) / static_cast<double>(n);
  out.map = ProbabilityMap(std::move(phat), "lsh", std::move(cluster));
  out.map.warnings() = out.warnings;
  return out;
}

OracleFactory labels_oracle_factory(const Dataset& data) {
  return [&data](std::span<const std::size_t> rows) { return labels_oracle(data, rows); };
}

}  // namespace entity_sampler
