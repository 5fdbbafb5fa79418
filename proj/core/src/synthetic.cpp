#include "entity_sampler/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "entity_sampler/error.hpp"
#include "entity_sampler/rng.hpp"

namespace entity_sampler::synthetic {

Dataset table(std::size_t n, std::uint64_t seed, double value_min, double value_max) {
  Rng rng(seed);
  std::uniform_int_distribution<long long> val(static_cast<long long>(value_min),
                                               static_cast<long long>(value_max));
  DatasetColumns c;
  c.dim = 2;
  c.features.resize(2 * n);
  c.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = static_cast<double>(val(rng));
    c.features[2 * i] = static_cast<double>(i);
    c.features[2 * i + 1] = v;
    c.values[i] = v;
  }
  return Dataset(std::move(c));
}

Dataset with_frequencies(std::span<const std::size_t> freq, std::uint64_t seed) {
  Rng rng(seed);
  DatasetColumns c;
  c.dim = 1;
  for (std::size_t e = 0; e < freq.size(); ++e) {
    if (freq[e] == 0) throw ConfigError("entity frequencies must be positive");
    const double v = std::floor(uniform01(rng) * 1000.0);
    for (std::size_t t = 0; t < freq[e]; ++t) {
      c.features.push_back(static_cast<double>(e));
      c.values.push_back(v);
      c.entity_labels.push_back("e" + std::to_string(e));
    }
  }
  return Dataset(std::move(c));
}

std::vector<double> unit_ball_point(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(d);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& v : x) {
      v = g(rng);
      norm += v * v;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  const double radius = std::pow(uniform01(rng), 1.0 / static_cast<double>(d));
  for (double& v : x) v *= radius / norm;
  return x;
}

PlantedInstance planted_balls(std::span<const double> centers, std::size_t d,
                              std::size_t per_cluster, std::size_t singletons, double far_gap,
                              std::uint64_t seed) {
  if (d == 0 || centers.size() % d != 0) throw ConfigError("centers do not match dimension");
  const std::size_t k = centers.size() / d;
  PlantedInstance out;
  out.d = d;
  out.clusters = k;
  std::uint64_t draw = 0;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = 0; i < per_cluster; ++i) {
      const auto x = unit_ball_point(d, derive_seed(seed, {draw++}));
      for (std::size_t t = 0; t < d; ++t) out.points.push_back(centers[c * d + t] + x[t]);
      out.truth.push_back(static_cast<std::uint32_t>(c));
    }
  // Singletons on a line far beyond every cluster, far_gap apart.
  double reach = 0.0;
  for (double v : centers) reach = std::max(reach, std::abs(v));
  for (std::size_t s = 0; s < singletons; ++s) {
    for (std::size_t t = 0; t < d; ++t)
      out.points.push_back(t == 0 ? reach + 1.0 + far_gap * static_cast<double>(s + 1) : 0.0);
    out.truth.push_back(static_cast<std::uint32_t>(k + s));
  }
  return out;
}

XiGmmGrid xi_gmm_grid(const MixtureModel& model, double spacing, double radius,
                      std::size_t min_freq, double jitter, std::uint64_t seed) {
  model.validate();
  if (model.d != 2) throw ConfigError("the xi-GMM grid is two-dimensional");
  if (!(spacing > 0.0) || !(radius > 0.0) || min_freq == 0)
    throw ConfigError("grid needs positive spacing, radius and min_freq");
  double lo[2] = {INFINITY, INFINITY}, hi[2] = {-INFINITY, -INFINITY};
  for (std::size_t j = 0; j < model.k; ++j)
    for (int t = 0; t < 2; ++t) {
      lo[t] = std::min(lo[t], model.means[j * 2 + t] - radius);
      hi[t] = std::max(hi[t], model.means[j * 2 + t] + radius);
    }
  std::vector<double> grid;
  for (double x = lo[0]; x <= hi[0] + 1e-12; x += spacing)
    for (double y = lo[1]; y <= hi[1] + 1e-12; y += spacing) {
      bool inside = false;
      for (std::size_t j = 0; j < model.k && !inside; ++j) {
        const double dx = x - model.means[j * 2], dy = y - model.means[j * 2 + 1];
        inside = dx * dx + dy * dy <= radius * radius;
      }
      if (inside) {
        grid.push_back(x);
        grid.push_back(y);
      }
    }
  const std::size_t m = grid.size() / 2;
  std::vector<double> dens(m);
  double dmin = INFINITY, dsum = 0.0;
  for (std::size_t e = 0; e < m; ++e) {
    dens[e] = gmm_density(model, std::span<const double>(grid.data() + 2 * e, 2));
    dmin = std::min(dmin, dens[e]);
    dsum += dens[e];
  }

  Rng rng(seed);
  std::uniform_real_distribution<double> u(-jitter, jitter);
  DatasetColumns c;
  c.dim = 2;
  std::vector<std::size_t> freq(m);
  std::size_t n = 0;
  for (std::size_t e = 0; e < m; ++e) {
    const double target = static_cast<double>(min_freq) * dens[e] / dmin * (1.0 + u(rng));
    freq[e] = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(target)));
    n += freq[e];
  }
  for (std::size_t e = 0; e < m; ++e)
    for (std::size_t t = 0; t < freq[e]; ++t) {
      c.features.push_back(grid[2 * e]);
      c.features.push_back(grid[2 * e + 1]);
      c.values.push_back(grid[2 * e]);
      c.entity_labels.push_back("g" + std::to_string(e));
    }

  XiGmmGrid out;
  out.data = Dataset(std::move(c));
  out.normalized_density.resize(m);
  for (std::size_t e = 0; e < m; ++e) {
    out.normalized_density[e] = dens[e] / dsum;
    const double prob = static_cast<double>(freq[e]) / static_cast<double>(n);
    out.realized_xi = std::max(out.realized_xi,
                               std::abs(prob - out.normalized_density[e]) / out.normalized_density[e]);
  }
  return out;
}

std::string random_text(std::size_t words, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> len(3, 9);
  std::uniform_int_distribution<int> ch('a', 'z');
  std::string out;
  for (std::size_t w = 0; w < words; ++w) {
    if (w > 0) out.push_back(' ');
    const int l = len(rng);
    for (int i = 0; i < l; ++i) out.push_back(static_cast<char>(ch(rng)));
  }
  return out;
}

std::string perturb_text(const std::string& text, std::size_t edits, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> ch('a', 'z');
  std::string out = text;
  std::vector<std::size_t> letters;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i] != ' ') letters.push_back(i);
  for (std::size_t e = 0; e < edits && !letters.empty(); ++e) {
    const std::size_t pos = letters[uniform_index(rng, letters.size())];
    char c;
    do c = static_cast<char>(ch(rng));
    while (c == out[pos]);
    out[pos] = c;
  }
  return out;
}

Dataset text_corpus(std::size_t entities, std::span<const double> copy_probs,
                    std::size_t words, std::size_t max_edits, std::uint64_t seed) {
  if (copy_probs.empty()) throw ConfigError("copy profile must be nonempty");
  Rng rng(seed);
  std::discrete_distribution<std::size_t> extra(copy_probs.begin(), copy_probs.end());
  std::uniform_int_distribution<std::size_t> nedit(0, max_edits);
  DatasetColumns c;
  for (std::size_t e = 0; e < entities; ++e) {
    const std::string base = random_text(words, derive_seed(seed, {e, 0}));
    const double value = std::floor(uniform01(rng) * 1000.0);
    const std::size_t copies = 1 + extra(rng);
    for (std::size_t t = 0; t < copies; ++t) {
      std::string text = t == 0 ? base : perturb_text(base, nedit(rng), derive_seed(seed, {e, t + 1}));
      c.tokens.push_back(shingle_hashes(text, 3));
      c.texts.push_back(std::move(text));
      c.values.push_back(value);
      c.entity_labels.push_back("p" + std::to_string(e));
    }
  }
  return Dataset(std::move(c));
}

}  // namespace entity_sampler::synthetic
