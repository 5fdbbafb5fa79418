#include "entity_sampler/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>

#include "entity_sampler/error.hpp"
#include "entity_sampler/rng.hpp"

namespace entity_sampler {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;  // smallest index is the root
  }

 private:
  std::vector<std::size_t> parent_;
};

// signature[i * k + j] = value of hash function j on record i.
std::vector<std::uint64_t> minhash_signatures(const Dataset& data, std::size_t k,
                                              std::uint64_t seed) {
  std::vector<std::uint64_t> salts(k);
  for (std::size_t j = 0; j < k; ++j) salts[j] = derive_seed(seed, {j});
  std::vector<std::uint64_t> sig(data.size() * k);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto toks = data.tokens(i);
    for (std::size_t j = 0; j < k; ++j) {
      std::uint64_t best = UINT64_MAX;
      for (auto t : toks) best = std::min(best, mix64(t ^ salts[j]));
      sig[i * k + j] = best;
    }
  }
  return sig;
}

std::vector<std::uint64_t> hyperplane_signatures(const Dataset& data, std::size_t k,
                                                 std::uint64_t seed) {
  const std::size_t d = data.dim();
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> planes(k * d);
  for (double& w : planes) w = gauss(rng);
  std::vector<std::uint64_t> sig(data.size() * k);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.features(i);
    for (std::size_t j = 0; j < k; ++j) {
      double dot = 0.0;
      for (std::size_t t = 0; t < d; ++t) dot += planes[j * d + t] * x[t];
      sig[i * k + j] = dot >= 0.0 ? 1 : 0;
    }
  }
  return sig;
}

}  // namespace

LshConfig choose_bands_rows(double lambda, double delta, HashFamily family) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("lambda must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must be in (0,1)");
  const double lo = 1.0 / (2.0 * lambda);
  const double hi = 1.0 / -std::log1p(-lambda);
  const double r = std::floor(lo) + 1.0;
  if (!(r < hi))
    throw ConfigError("no integer r in (" + std::to_string(lo) + ", " + std::to_string(hi) +
                      ") for lambda=" + std::to_string(lambda) + "; choose a smaller lambda");
  LshConfig cfg;
  cfg.lambda = lambda;
  cfg.delta = delta;
  cfg.r = static_cast<std::size_t>(r);
  cfg.s = static_cast<std::size_t>(std::ceil(2.2 * std::log(1.0 / delta) - 1e-12));
  cfg.s = std::max<std::size_t>(cfg.s, 1);
  cfg.family = family;
  return cfg;
}

std::map<std::size_t, std::size_t> Blocking::size_histogram() const {
  std::map<std::size_t, std::size_t> h;
  for (const auto& b : blocks) ++h[b.size()];
  return h;
}

Blocking blocking_from_assignment(std::span<const std::uint32_t> assignment) {
  Blocking out;
  out.block_of.assign(assignment.size(), 0);
  std::unordered_map<std::uint32_t, std::uint32_t> remap;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    auto [it, fresh] = remap.try_emplace(assignment[i], static_cast<std::uint32_t>(out.blocks.size()));
    if (fresh) out.blocks.emplace_back();
    out.blocks[it->second].push_back(i);
    out.block_of[i] = it->second;
  }
  return out;
}

Blocking lsh_partition(const Dataset& data, const LshConfig& cfg, std::uint64_t seed) {
  if (cfg.r == 0 || cfg.s == 0) throw ConfigError("LSH needs r, s >= 1");
  const std::size_t k = cfg.r * cfg.s;
  std::vector<std::uint64_t> sig;
  if (cfg.family == HashFamily::kMinHash) {
    if (!data.has_tokens()) throw ConfigError("minhash blocking needs token sets (a text column)");
    sig = minhash_signatures(data, k, seed);
  } else {
    if (!data.has_vectors()) throw ConfigError("hyperplane blocking needs feature vectors");
    sig = hyperplane_signatures(data, k, seed);
  }

  const std::size_t n = data.size();
  UnionFind uf(n);
  std::unordered_map<std::uint64_t, std::size_t> first;
  for (std::size_t band = 0; band < cfg.s; ++band) {
    first.clear();
    for (std::size_t i = 0; i < n; ++i) {
      // g_band = (h_{band*r}, ..., h_{band*r + r - 1})
      std::uint64_t key = mix64(band);
      for (std::size_t j = band * cfg.r; j < (band + 1) * cfg.r; ++j) key = mix64(key ^ sig[i * k + j]);
      auto [it, fresh] = first.try_emplace(key, i);
      if (!fresh) uf.unite(it->second, i);
    }
  }
  std::vector<std::uint32_t> root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = static_cast<std::uint32_t>(uf.find(i));
  return blocking_from_assignment(root);
}

double jaccard_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0, i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else { ++inter; ++i; ++j; }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace entity_sampler
