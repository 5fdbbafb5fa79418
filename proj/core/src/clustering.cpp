#include "entity_sampler/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "entity_sampler/error.hpp"
#include "entity_sampler/lsh.hpp"
#include "entity_sampler/rng.hpp"

namespace entity_sampler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Squared distances restricted to the clustered points (local 0..p-1).
struct SubMatrix {
  std::size_t p;
  std::vector<double> d2;
  double operator()(std::size_t i, std::size_t j) const { return d2[i * p + j]; }
};

SubMatrix squared_sub(const PairwiseDistances& d, std::span<const std::size_t> points) {
  SubMatrix s{points.size(), std::vector<double>(points.size() * points.size())};
  for (std::size_t i = 0; i < s.p; ++i)
    for (std::size_t j = 0; j < s.p; ++j) {
      const double v = d(points[i], points[j]);
      s.d2[i * s.p + j] = v * v;
    }
  return s;
}

double partition_cost(const SubMatrix& s, const std::vector<std::uint32_t>& lab, std::size_t k) {
  std::vector<double> within(k, 0.0);
  std::vector<std::size_t> size(k, 0);
  for (std::size_t i = 0; i < s.p; ++i) {
    ++size[lab[i]];
    for (std::size_t j = i + 1; j < s.p; ++j)
      if (lab[i] == lab[j]) within[lab[i]] += s(i, j);
  }
  double cost = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    if (size[c] > 0) cost += within[c] / static_cast<double>(size[c]);
  return cost;
}

Clustering from_labels(std::span<const std::size_t> points, const std::vector<std::uint32_t>& lab,
                       std::size_t k) {
  Clustering c;
  c.clusters.resize(k);
  for (std::size_t i = 0; i < points.size(); ++i) c.clusters[lab[i]].push_back(points[i]);
  c.clusters.erase(std::remove_if(c.clusters.begin(), c.clusters.end(),
                                  [](const auto& v) { return v.empty(); }),
                   c.clusters.end());
  normalize(c);
  return c;
}

// Kernel k-means state: squared distance of point i to the centroid of
// cluster c is row[c]/|c| - within[c]/|c|^2 with row[c] = Σ_{y∈c} d2(i,y)
// and within[c] = Σ_{y<z∈c} d2(y,z).
struct KernelState {
  const SubMatrix& s;
  std::size_t k;
  std::vector<std::uint32_t> lab;
  std::vector<std::size_t> size;
  std::vector<double> within;
  std::vector<double> row;  // p x k

  KernelState(const SubMatrix& sub, std::size_t kk, std::vector<std::uint32_t> labels)
      : s(sub), k(kk), lab(std::move(labels)) {
    rebuild();
  }

  void rebuild() {
    size.assign(k, 0);
    within.assign(k, 0.0);
    row.assign(s.p * k, 0.0);
    for (std::size_t i = 0; i < s.p; ++i) {
      ++size[lab[i]];
      for (std::size_t j = 0; j < s.p; ++j) {
        row[i * k + lab[j]] += s(i, j);
        if (j > i && lab[i] == lab[j]) within[lab[i]] += s(i, j);
      }
    }
  }

  double dist_to(std::size_t i, std::size_t c) const {
    if (size[c] == 0) return kInf;
    const double n = static_cast<double>(size[c]);
    return row[i * k + c] / n - within[c] / (n * n);
  }

  double cost() const {
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c)
      if (size[c] > 0) total += within[c] / static_cast<double>(size[c]);
    return total;
  }

  void move(std::size_t i, std::uint32_t to) {
    const std::uint32_t from = lab[i];
    within[from] -= row[i * k + from];  // d2(i,i) = 0
    within[to] += row[i * k + to];
    --size[from];
    ++size[to];
    lab[i] = to;
    for (std::size_t j = 0; j < s.p; ++j) {
      row[j * k + from] -= s(j, i);
      row[j * k + to] += s(j, i);
    }
  }
};

std::vector<std::uint32_t> seed_plus_plus(const SubMatrix& s, std::size_t k, Rng& rng) {
  std::vector<std::size_t> centers{uniform_index(rng, s.p)};
  std::vector<double> best(s.p, kInf);
  while (centers.size() < k) {
    const std::size_t last = centers.back();
    double total = 0.0;
    for (std::size_t i = 0; i < s.p; ++i) {
      best[i] = std::min(best[i], s(i, last));
      total += best[i];
    }
    std::size_t next = 0;
    if (total <= 0.0) {
      // All remaining points coincide with a center; pick any non-center.
      for (std::size_t i = 0; i < s.p; ++i)
        if (std::find(centers.begin(), centers.end(), i) == centers.end()) { next = i; break; }
    } else {
      double u = uniform01(rng) * total;
      next = s.p - 1;
      for (std::size_t i = 0; i < s.p; ++i) {
        u -= best[i];
        if (u < 0.0 && best[i] > 0.0) { next = i; break; }
      }
    }
    centers.push_back(next);
  }
  std::vector<std::uint32_t> lab(s.p);
  for (std::size_t i = 0; i < s.p; ++i) {
    std::size_t arg = 0;
    for (std::size_t c = 1; c < k; ++c)
      if (s(i, centers[c]) < s(i, centers[arg])) arg = c;
    lab[i] = static_cast<std::uint32_t>(arg);
  }
  for (std::size_t c = 0; c < k; ++c) lab[centers[c]] = static_cast<std::uint32_t>(c);
  return lab;
}

void refill_empty(KernelState& st) {
  for (std::size_t c = 0; c < st.k; ++c) {
    if (st.size[c] > 0) continue;
    // Move the point farthest from its centroid out of a cluster with >1 member.
    std::size_t arg = st.s.p;
    double far = -1.0;
    for (std::size_t i = 0; i < st.s.p; ++i) {
      if (st.size[st.lab[i]] < 2) continue;
      const double v = st.dist_to(i, st.lab[i]);
      if (v > far) { far = v; arg = i; }
    }
    if (arg == st.s.p) return;
    st.move(arg, static_cast<std::uint32_t>(c));
  }
}

void local_search(KernelState& st, std::size_t max_iterations) {
  for (std::size_t it = 0; it < max_iterations; ++it) {
    bool changed = false;
    std::vector<std::uint32_t> next(st.lab);
    for (std::size_t i = 0; i < st.s.p; ++i) {
      std::uint32_t arg = st.lab[i];
      double best = st.dist_to(i, arg);
      for (std::size_t c = 0; c < st.k; ++c) {
        const double v = st.dist_to(i, c);
        if (v < best - 1e-12) { best = v; arg = static_cast<std::uint32_t>(c); }
      }
      if (arg != st.lab[i]) { next[i] = arg; changed = true; }
    }
    if (!changed) break;
    st.lab = std::move(next);
    st.rebuild();
    refill_empty(st);
  }
  // Hartigan: move i from A to B when |B|/(|B|+1) d(i,B) < |A|/(|A|-1) d(i,A).
  for (std::size_t pass = 0; pass < 100 * st.s.p; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i < st.s.p; ++i) {
      const std::uint32_t a = st.lab[i];
      if (st.size[a] < 2) continue;
      const double na = static_cast<double>(st.size[a]);
      const double remove_gain = na / (na - 1.0) * st.dist_to(i, a);
      std::uint32_t arg = a;
      double best_delta = -1e-12 * (1.0 + remove_gain);
      for (std::size_t c = 0; c < st.k; ++c) {
        if (c == a) continue;
        const double nb = static_cast<double>(st.size[c]);
        const double add_cost = nb == 0 ? 0.0 : nb / (nb + 1.0) * st.dist_to(i, c);
        const double delta = add_cost - remove_gain;
        if (delta < best_delta) { best_delta = delta; arg = static_cast<std::uint32_t>(c); }
      }
      if (arg != a) {
        st.move(i, arg);
        improved = true;
      }
    }
    if (!improved) break;
  }
}

}  // namespace

PairwiseDistances PairwiseDistances::from_records(const Dataset& data,
                                                  std::span<const std::size_t> rows) {
  PairwiseDistances out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      double v;
      if (data.has_vectors()) {
        const auto a = data.features(rows[i]);
        const auto b = data.features(rows[j]);
        double ss = 0.0;
        for (std::size_t t = 0; t < a.size(); ++t) ss += (a[t] - b[t]) * (a[t] - b[t]);
        v = std::sqrt(ss);
      } else {
        v = jaccard_distance(data.tokens(rows[i]), data.tokens(rows[j]));
      }
      out.set(i, j, v);
    }
  }
  return out;
}

PairwiseDistances PairwiseDistances::euclidean(std::span<const double> points, std::size_t d) {
  if (d == 0 || points.size() % d != 0) throw ConfigError("point matrix does not match dimension");
  const std::size_t n = points.size() / d;
  PairwiseDistances out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double ss = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        const double diff = points[i * d + t] - points[j * d + t];
        ss += diff * diff;
      }
      out.set(i, j, std::sqrt(ss));
    }
  return out;
}

std::vector<std::uint32_t> Clustering::labels(std::size_t n) const {
  std::vector<std::uint32_t> lab(n, UINT32_MAX);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (auto i : clusters[c]) lab[i] = static_cast<std::uint32_t>(c);
  auto next = static_cast<std::uint32_t>(clusters.size());
  for (auto i : garbage) lab[i] = next++;
  for (auto& l : lab)
    if (l == UINT32_MAX) l = next++;
  return lab;
}

void normalize(Clustering& c) {
  for (auto& v : c.clusters) std::sort(v.begin(), v.end());
  std::sort(c.clusters.begin(), c.clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  std::sort(c.garbage.begin(), c.garbage.end());
}

double kmeans_cost(const PairwiseDistances& d, const Clustering& c) {
  double cost = 0.0;
  for (const auto& cl : c.clusters) {
    double within = 0.0;
    for (std::size_t a = 0; a < cl.size(); ++a)
      for (std::size_t b = a + 1; b < cl.size(); ++b) {
        const double v = d(cl[a], cl[b]);
        within += v * v;
      }
    if (!cl.empty()) cost += within / static_cast<double>(cl.size());
  }
  return cost;
}

Clustering brute_force_kmeans(const PairwiseDistances& d, std::span<const std::size_t> points,
                              std::size_t k) {
  const std::size_t p = points.size();
  if (k == 0 || k > p)
    throw ConfigError("k=" + std::to_string(k) + " is invalid for " + std::to_string(p) + " points");
  const SubMatrix s = squared_sub(d, points);
  // Restricted growth strings enumerate each set partition once.
  std::vector<std::uint32_t> lab(p, 0), best_lab;
  std::vector<std::uint32_t> maxpre(p, 0);
  double best = kInf;
  auto advance = [&]() {
    for (std::size_t i = p; i-- > 1;) {
      const auto limit = std::min<std::uint32_t>(maxpre[i - 1] + 1, static_cast<std::uint32_t>(k - 1));
      if (lab[i] < limit) {
        ++lab[i];
        maxpre[i] = std::max(maxpre[i - 1], lab[i]);
        for (std::size_t j = i + 1; j < p; ++j) {
          lab[j] = 0;
          maxpre[j] = maxpre[j - 1];
        }
        return true;
      }
    }
    return false;
  };
  do {
    if (maxpre[p - 1] + 1 == k) {
      const double cost = partition_cost(s, lab, k);
      if (cost < best - 1e-12) { best = cost; best_lab = lab; }
    }
  } while (advance());
  return from_labels(points, best_lab, k);
}

Clustering lloyd_kmeans(const PairwiseDistances& d, std::span<const std::size_t> points,
                        std::size_t k, std::uint64_t seed, const LloydOptions& opts) {
  const std::size_t p = points.size();
  if (k == 0 || k > p)
    throw ConfigError("k=" + std::to_string(k) + " is invalid for " + std::to_string(p) + " points");
  const SubMatrix s = squared_sub(d, points);
  if (k == 1) return from_labels(points, std::vector<std::uint32_t>(p, 0), 1);
  if (k == p) {
    std::vector<std::uint32_t> lab(p);
    for (std::size_t i = 0; i < p; ++i) lab[i] = static_cast<std::uint32_t>(i);
    return from_labels(points, lab, k);
  }
  double best = kInf;
  std::vector<std::uint32_t> best_lab;
  const std::size_t restarts = std::max<std::size_t>(opts.restarts, 1);
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, {r}));
    KernelState st(s, k, seed_plus_plus(s, k, rng));
    refill_empty(st);
    local_search(st, opts.max_iterations);
    const double cost = st.cost();
    if (cost < best - 1e-12) { best = cost; best_lab = st.lab; }
  }
  return from_labels(points, best_lab, k);
}

std::vector<std::size_t> prefilter_survivors(const PairwiseDistances& d, double mu) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      if (j != i && d(i, j) <= mu) { keep.push_back(i); break; }
  return keep;
}

Clustering regularized_kmeans(const PairwiseDistances& d, std::size_t k, double mu,
                              std::uint64_t seed, const RegularizedOptions& opts) {
  if (!(mu > 0.0)) throw ConfigError("prefilter radius mu must be positive");
  const auto keep = prefilter_survivors(d, mu);
  Clustering out;
  if (!keep.empty()) {
    if (k == 0 || k > keep.size())
      throw ConfigError("k=" + std::to_string(k) + " but " + std::to_string(keep.size()) +
                        " points remain after the prefilter");
    out = keep.size() <= opts.brute_force_cap ? brute_force_kmeans(d, keep, k)
                                              : lloyd_kmeans(d, keep, k, seed, opts.lloyd);
  }
  std::size_t j = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (j < keep.size() && keep[j] == i) { ++j; continue; }
    out.garbage.push_back(i);
  }
  normalize(out);
  return out;
}

}  // namespace entity_sampler
