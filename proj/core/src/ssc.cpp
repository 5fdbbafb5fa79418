#include "entity_sampler/ssc.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "entity_sampler/error.hpp"
#include "entity_sampler/rng.hpp"

namespace entity_sampler {

namespace {

struct Pair {
  std::size_t x, y;
};

void score(const SscInstance& inst, const std::vector<Pair>& pos, const std::vector<Pair>& neg,
           SscResult& out) {
  const std::size_t g = inst.candidates.size();
  out.loss.assign(g, 0.0);
  out.pl.assign(g, 0.0);
  out.nl.assign(g, 0.0);
  for (std::size_t c = 0; c < g; ++c) {
    const auto lab = inst.candidates[c].labels(inst.n_points);
    std::size_t split = 0, joined = 0;
    for (const auto& p : pos) split += lab[p.x] != lab[p.y];
    for (const auto& p : neg) joined += lab[p.x] == lab[p.y];
    out.pl[c] = pos.empty() ? 0.0 : static_cast<double>(split) / static_cast<double>(pos.size());
    out.nl[c] = neg.empty() ? 0.0 : static_cast<double>(joined) / static_cast<double>(neg.size());
    out.loss[c] = inst.mu_weight * out.pl[c] + (1.0 - inst.mu_weight) * out.nl[c];
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < g; ++c) {
    const double a = out.loss[c], b = out.loss[best];
    if (a < b - 1e-12 ||
        (std::abs(a - b) <= 1e-12 && inst.candidates[c].k() < inst.candidates[best].k()))
      best = c;
  }
  out.index = best;
}

}  // namespace

SscResult ssc_select(const SscInstance& inst, std::uint64_t seed, const SscOptions& opts) {
  if (inst.candidates.empty()) throw ConfigError("SSC needs at least one candidate clustering");
  if (!inst.oracle) throw ConfigError("SSC needs an oracle");
  if (!(inst.mu_weight >= 0.0 && inst.mu_weight <= 1.0))
    throw ConfigError("SSC loss weight must be in [0,1]");
  const std::size_t n = inst.n_points;
  SscResult out;
  std::vector<Pair> pos, neg;

  if (n < 2) {
    score(inst, pos, neg, out);
    return out;
  }

  if (opts.exhaustive) {
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = x + 1; y < n; ++y) {
        ++out.queries;
        (inst.oracle(x, y) ? pos : neg).push_back({x, y});
      }
  } else {
    if (inst.m_pairs == 0) throw ConfigError("SSC pair budget must be at least 1");
    const std::size_t m = inst.m_pairs;
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t seen_neg = 0;
    double cap = 0.0;
    while (pos.size() < m || neg.size() < m) {
      if (cap > 0.0 && static_cast<double>(out.queries) >= cap) {
        if (!opts.allow_partial)
          throw ConvergenceError("SSC oracle exhausted after " + std::to_string(out.queries) +
                                 " queries with " + std::to_string(pos.size()) + " positive and " +
                                 std::to_string(neg.size()) + " negative pairs");
        out.partial = true;
        break;
      }
      const std::size_t x = pick(rng);
      std::size_t y = pick(rng);
      while (y == x) y = pick(rng);
      ++out.queries;
      const bool same = inst.oracle(x, y);
      if (!same) ++seen_neg;
      if (same && pos.size() < m) pos.push_back({x, y});
      if (!same && neg.size() < m) neg.push_back({x, y});
      if (out.queries == opts.gamma_window) {
        // Laplace smoothing keeps gamma_hat inside (0,1).
        out.gamma_hat = (static_cast<double>(seen_neg) + 1.0) / (static_cast<double>(out.queries) + 2.0);
        cap = (1.0 + opts.nu) * (static_cast<double>(m) / out.gamma_hat +
                                 static_cast<double>(m) / (1.0 - out.gamma_hat));
        out.query_cap = cap;
      }
    }
    if (out.gamma_hat == 0.0 && out.queries > 0)
      out.gamma_hat = (static_cast<double>(seen_neg) + 1.0) / (static_cast<double>(out.queries) + 2.0);
  }
  out.positives = pos.size();
  out.negatives = neg.size();
  score(inst, pos, neg, out);
  return out;
}

PairLoss true_pair_loss(const Clustering& c, std::span<const std::uint32_t> target,
                        double mu_weight) {
  const std::size_t n = target.size();
  const auto lab = c.labels(n);
  std::size_t pos = 0, neg = 0, split = 0, joined = 0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      if (target[x] == target[y]) {
        ++pos;
        split += lab[x] != lab[y];
      } else {
        ++neg;
        joined += lab[x] == lab[y];
      }
    }
  PairLoss out;
  out.pl = pos == 0 ? 0.0 : static_cast<double>(split) / static_cast<double>(pos);
  out.nl = neg == 0 ? 0.0 : static_cast<double>(joined) / static_cast<double>(neg);
  out.loss = mu_weight * out.pl + (1.0 - mu_weight) * out.nl;
  return out;
}

std::size_t ssc_pair_budget(std::size_t s, double epsilon, double delta, double a) {
  if (s == 0) throw ConfigError("candidate count must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) || !(a > 0.0))
    throw ConfigError("SSC budget needs epsilon, delta in (0,1) and a > 0");
  const double m = a * (std::log(static_cast<double>(s)) + std::log(2.0 / delta)) / (epsilon * epsilon);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(m)));
}

PairOracle labels_oracle(const Dataset& data, std::span<const std::size_t> rows) {
  std::vector<std::uint32_t> ent(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) ent[i] = data.entity_of(rows[i]);
  return [ent = std::move(ent)](std::size_t x, std::size_t y) { return ent[x] == ent[y]; };
}

}  // namespace entity_sampler
