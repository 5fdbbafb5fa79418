// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "entity_sampler/balanced.hpp"
#include "entity_sampler/clustering.hpp"
#include "entity_sampler/distribution.hpp"
#include "entity_sampler/experiment.hpp"
#include "entity_sampler/gmm.hpp"
#include "entity_sampler/lsh.hpp"
#include "entity_sampler/rejection_sampler.hpp"
#include "entity_sampler/ssc.hpp"
#include "entity_sampler/synthetic.hpp"

namespace es = entity_sampler;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = 0.5 * static_cast<double>(i + j);
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Minimum within-cluster sum of squares over labelings using all k labels.
double brute_sse(const std::vector<double>& pts, std::size_t d, std::size_t k) {
  const std::size_t n = pts.size() / d;
  std::vector<std::size_t> lab(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<std::size_t> cnt(k, 0);
    for (auto l : lab) ++cnt[l];
    if (std::all_of(cnt.begin(), cnt.end(), [](std::size_t c) { return c > 0; })) {
      std::vector<double> mean(k * d, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < d; ++t) mean[lab[i] * d + t] += pts[i * d + t] / static_cast<double>(cnt[lab[i]]);
      double sse = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < d; ++t) sse += std::pow(pts[i * d + t] - mean[lab[i] * d + t], 2);
      best = std::min(best, sse);
    }
    std::size_t i = 0;
    while (i < n && ++lab[i] == k) lab[i++] = 0;
    if (i == n) break;
  }
  return best;
}

es::Clustering clustering_from_labels(const std::vector<std::uint32_t>& lab) {
  std::uint32_t k = 0;
  for (auto l : lab) k = std::max(k, l + 1);
  es::Clustering c;
  c.clusters.resize(k);
  for (std::size_t i = 0; i < lab.size(); ++i) c.clusters[lab[i]].push_back(i);
  c.clusters.erase(std::remove_if(c.clusters.begin(), c.clusters.end(),
                                  [](const auto& v) { return v.empty(); }),
                   c.clusters.end());
  es::normalize(c);
  return c;
}

std::vector<std::uint32_t> random_labels(std::mt19937_64& rng, std::size_t n, std::uint32_t k) {
  std::uniform_int_distribution<std::uint32_t> u(0, k - 1);
  std::vector<std::uint32_t> l(n);
  for (std::size_t i = 0; i < n; ++i) l[i] = i < k ? static_cast<std::uint32_t>(i) : u(rng);
  return l;
}

// ---------------------------------------------------------------------------

Outcome exact_uniformity() {
  double worst = 0.0;
  std::mt19937_64 rng(1);
  for (std::size_t entities : {1, 10, 1000, 10000}) {
    std::uniform_int_distribution<std::size_t> f(1, 7);
    std::vector<std::size_t> freq(entities);
    for (auto& x : freq) x = f(rng);
    const auto data = es::synthetic::with_frequencies(freq, entities);
    const auto map = es::exact_probability_map(data);
    std::vector<std::string> labels;
    for (std::uint32_t e = 0; e < data.entity_count(); ++e) labels.push_back(data.entity_name(e));
    const auto target = es::DiscreteDistribution::uniform(labels);
    worst = std::max(worst, es::tv_distance(es::exact_induced_distribution(data, map), target));
  }
  return {worst <= 1e-12, fmt("max TV %.3g over |E| in {1,10,1e3,1e4}", worst)};
}

Outcome balanced_cleanability() {
  // |E| = 50, n = 10^4, smallest entity mass exactly 1/100.
  std::vector<std::size_t> freq(50, 202);
  freq[0] = 100;
  freq[1] = 202 + 9900 - 202 * 49;
  const auto data = es::synthetic::with_frequencies(freq, 2);
  const auto plan = es::plan_sample_size(0.1, 0.1, 0.01, 50, 1.0);
  int ok = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto map = es::estimate_probs_balanced(data, plan.m, seed);
    const double tv = es::induced_tv_to_uniform(data, map);
    worst = std::max(worst, tv);
    ok += tv <= 0.1;
  }
  return {ok >= 45, fmt("m=%zu, %d/50 seeds with TV<=0.1 (max %.4f)", plan.m, ok, worst)};
}

Outcome error_trend() {
  const auto clean = es::synthetic::table(1000000, 3);
  es::ExperimentSpec spec;
  spec.fractions = {0.01, 0.02, 0.04, 0.06, 0.08, 0.1};
  spec.dup_rates = {0.1, 0.3};
  spec.repeats = 100;
  spec.seed = 3;
  spec.profile.kind = es::DupKind::kUniform;
  const auto report = es::run_experiment(clean, spec);
  // Reference errors for dup=0.1 from the published TPC-H sweep.
  const double reference[6] = {2.12e-3, 1.64e-3, 1.41e-3, 1.23e-3, 1.11e-3, 1.16e-3};

  bool decreasing = true, dominates = true, magnitude = true;
  std::string rows;
  for (std::size_t di = 0; di < 2; ++di) {
    std::vector<double> errs;
    for (std::size_t f = 0; f < 6; ++f) errs.push_back(report.cell(di, f).mean_error);
    const double rho = spearman(spec.fractions, errs);
    decreasing = decreasing && rho < 0.0;
    rows += fmt(" dup=%.1f rho=%.2f [", spec.dup_rates[di], rho);
    for (std::size_t f = 0; f < 6; ++f) rows += fmt("%s%.2e", f ? " " : "", errs[f]);
    rows += "]";
  }
  for (std::size_t f = 0; f < 6; ++f) {
    const double e1 = report.cell(0, f).mean_error, e3 = report.cell(1, f).mean_error;
    dominates = dominates && e3 > e1;
    magnitude = magnitude && e1 <= 5.0 * reference[f] && e1 >= reference[f] / 5.0;
  }
  const bool pass = decreasing && dominates && magnitude && report.total_failures() == 0;
  return {pass, fmt("decreasing=%s dup0.3-dominates=%s within-x5=%s failures=%zu;",
                    decreasing ? "yes" : "no", dominates ? "yes" : "no", magnitude ? "yes" : "no",
                    report.total_failures()) +
                    rows};
}

Outcome lsh_recall() {
  const auto cfg = es::choose_bands_rows(0.2, 0.1);
  int together = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const auto base = es::synthetic::random_text(8, t);
    std::string dup;
    for (std::uint64_t s = 0;; ++s) {
      dup = es::synthetic::perturb_text(base, 2, t * 1000 + s);
      if (es::jaccard_distance(es::shingle_hashes(base), es::shingle_hashes(dup)) <= 0.2) break;
    }
    es::DatasetColumns c;
    c.texts = {base, dup};
    c.tokens = {es::shingle_hashes(base), es::shingle_hashes(dup)};
    const auto b = es::lsh_partition(es::Dataset(std::move(c)), cfg, 1000 + t);
    together += b.block_of[0] == b.block_of[1];
  }
  return {together >= 900, fmt("r=%zu s=%zu, co-blocked %d/1000", cfg.r, cfg.s, together)};
}

Outcome clustering_oracle() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> np(2, 9), dim(1, 3);
  std::normal_distribution<double> g(0.0, 1.0);
  int equal = 0;
  es::RegularizedOptions lloyd_only;
  lloyd_only.brute_force_cap = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = np(rng), d = dim(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(n, 4))(rng);
    std::vector<double> pts(n * d);
    for (auto& v : pts) v = g(rng);
    const auto dist = es::PairwiseDistances::euclidean(pts, d);
    const double oracle = brute_sse(pts, d, k);
    const auto sol = es::regularized_kmeans(dist, k, 1e9, i, lloyd_only);
    const auto exact = es::regularized_kmeans(dist, k, 1e9, i);
    equal += std::abs(es::kmeans_cost(dist, sol) - oracle) <= 1e-9 * std::max(1.0, oracle) &&
             std::abs(es::kmeans_cost(dist, exact) - oracle) <= 1e-9 * std::max(1.0, oracle);
  }
  int recovered = 0;
  const std::vector<double> centers{0, 0, 4, 0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = es::synthetic::planted_balls(centers, 2, 50, 5, 3.0, seed);
    const auto dist = es::PairwiseDistances::euclidean(inst.points, 2);
    const auto c = es::regularized_kmeans(dist, 2, 1.0, seed);
    bool ok = c.k() == 2 && c.garbage == std::vector<std::size_t>{100, 101, 102, 103, 104};
    for (const auto& cl : c.clusters) {
      ok = ok && cl.size() == 50;
      for (auto p : cl) ok = ok && inst.truth[p] == inst.truth[cl.front()];
    }
    recovered += ok;
  }
  return {equal == 200 && recovered >= 18,
          fmt("objective matches brute force on %d/200; planted recovery %d/20", equal, recovered)};
}

Outcome ssc_correctness() {
  std::mt19937_64 rng(6);
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + static_cast<std::size_t>(trial) % 30;
    const auto target = random_labels(rng, n, 1 + static_cast<std::uint32_t>(trial % 4));
    es::SscInstance inst;
    inst.n_points = n;
    for (std::uint32_t k = 1; k <= 6; ++k)
      inst.candidates.push_back(clustering_from_labels(random_labels(rng, n, k)));
    inst.candidates.insert(inst.candidates.begin() + trial % 7, clustering_from_labels(target));
    inst.oracle = [&target](std::size_t x, std::size_t y) { return target[x] == target[y]; };
    es::SscOptions opts;
    opts.exhaustive = true;
    const auto r = es::ssc_select(inst, trial, opts);
    exact += es::true_pair_loss(inst.candidates[r.index], target).loss == 0.0;
  }

  const double alpha = 0.2;
  int good = 0, within_cap = 0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    const std::size_t n = 80;
    const auto target = random_labels(rng, n, 5);
    es::SscInstance inst;
    inst.n_points = n;
    for (std::uint32_t k = 1; k <= 8; ++k)
      inst.candidates.push_back(clustering_from_labels(random_labels(rng, n, k)));
    // Near misses: the target with a few points moved.
    for (int j = 0; j < 3; ++j) {
      auto near = target;
      for (int t = 0; t < 3 + 3 * j; ++t) near[rng() % n] = static_cast<std::uint32_t>(rng() % 5);
      inst.candidates.push_back(clustering_from_labels(near));
    }
    inst.candidates.push_back(clustering_from_labels(target));
    inst.m_pairs = es::ssc_pair_budget(inst.candidates.size(), alpha / 2, 0.1);
    inst.oracle = [&target](std::size_t x, std::size_t y) { return target[x] == target[y]; };
    const auto r = es::ssc_select(inst, 1000 + s);
    good += es::true_pair_loss(inst.candidates[r.index], target).loss <= alpha;
    // gamma over ordered pairs x != y.
    std::size_t neg = 0;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) neg += x != y && target[x] != target[y];
    const double gamma = static_cast<double>(neg) / static_cast<double>(n * (n - 1));
    const double m = static_cast<double>(inst.m_pairs);
    within_cap += static_cast<double>(r.queries) <= 2.0 * (m / gamma + m / (1.0 - gamma));
  }
  const bool pass = exact == 100 && good >= 45 && within_cap == seeds;
  return {pass, fmt("exhaustive %d/100; sampled winner loss<=%.1f on %d/%d; query bound held %d/%d",
                    exact, alpha, good, seeds, within_cap, seeds)};
}

Outcome em_recovery() {
  const double w0 = 0.4, m0 = -3.0, m1 = 3.0, v0 = 1.0, v1 = 1.0;
  int good = 0;
  bool monotone = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution first(w0);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> pts(10000);
    for (auto& x : pts) x = first(rng) ? m0 + std::sqrt(v0) * g(rng) : m1 + std::sqrt(v1) * g(rng);
    const auto r = es::em_fit(pts, 1, 2, {}, seed);
    for (std::size_t i = 1; i < r.log_likelihood.size(); ++i)
      monotone = monotone && r.log_likelihood[i] >= r.log_likelihood[i - 1] - 1e-9 * std::abs(r.log_likelihood[i - 1]);
    const auto& md = r.model;
    const std::size_t lo = md.means[0] < md.means[1] ? 0 : 1, hi = 1 - lo;
    const double err = std::max({std::abs(md.means[lo] - m0), std::abs(md.means[hi] - m1),
                                 std::abs(md.weights[lo] - w0), std::abs(md.variances[lo] - v0),
                                 std::abs(md.variances[hi] - v1)});
    good += err <= 0.1;
  }
  return {good >= 18 && monotone,
          fmt("parameter error<=0.1 on %d/20; log-likelihood monotone=%s", good, monotone ? "yes" : "no")};
}

Outcome gmm_sampler_bound() {
  es::MixtureModel truth{2, 2, {0.5, 0.5}, {-3, 0, 3, 0}, {1.0, 1.0}};
  const auto grid = es::synthetic::xi_gmm_grid(truth, 0.35, 3.0, 20, 0.02, 8);
  const double xi = grid.realized_xi;
  const auto& data = grid.data;
  const double tv_true = es::induced_tv_to_uniform(data, es::estimate_probs_gmm(data, truth));

  const double eps = 0.1;
  const auto plan = es::plan_gmm(eps, 0.1, 0.01, 0.5, 2, 2);
  const std::size_t m = std::min(plan.m, data.size());
  es::EmOptions opts;
  opts.iterations = plan.T;
  int ok = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
    std::vector<double> sample;
    sample.reserve(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto x = data.features(pick(rng));
      sample.insert(sample.end(), x.begin(), x.end());
    }
    const auto fit = es::em_fit(sample, 2, 2, opts, seed);
    const double tv = es::induced_tv_to_uniform(data, es::estimate_probs_gmm(data, fit.model));
    worst = std::max(worst, tv);
    ok += tv <= eps + xi;
  }
  const bool pass = xi <= 0.05 && tv_true <= xi + 0.02 && ok >= 45;
  return {pass, fmt("n=%zu xi=%.4f; true model TV=%.4f; fitted (m=%zu of planned %zu, T=%zu) "
                    "TV<=eps+xi on %d/50 (max %.4f)",
                    data.size(), xi, tv_true, m, plan.m, plan.T, ok, worst)};
}

// Calls visit(freq) for every partition of n into positive parts (non-increasing).
void partitions(std::size_t n, std::size_t max_part, std::vector<std::size_t>& cur,
                const std::function<void(const std::vector<std::size_t>&)>& visit) {
  if (n == 0) {
    visit(cur);
    return;
  }
  for (std::size_t p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions(n - p, p, cur, visit);
    cur.pop_back();
  }
}

Outcome goodman_unbiasedness() {
  std::size_t cases = 0, exact = 0, valid_cases = 0, valid_exact = 0;
  double worst = 0.0;
  for (std::size_t n = 2; n <= 8; ++n) {
    std::vector<std::size_t> cur;
    partitions(n, n, cur, [&](const std::vector<std::size_t>& freq) {
      std::vector<std::uint32_t> pop;
      for (std::size_t e = 0; e < freq.size(); ++e) pop.insert(pop.end(), freq[e], static_cast<std::uint32_t>(e));
      for (std::size_t m = 1; m < n; ++m) {
        double total = 0.0;
        std::size_t subsets = 0;
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(m), true);
        do {
          std::vector<std::uint32_t> s;
          for (std::size_t i = 0; i < n; ++i)
            if (pick[i]) s.push_back(pop[i]);
          total += es::goodman_estimate(es::FingerprintStats::from_sample(s), n).value;
          ++subsets;
        } while (std::prev_permutation(pick.begin(), pick.end()));
        const double err = std::abs(total / static_cast<double>(subsets) - static_cast<double>(freq.size()));
        const bool ok = err <= 1e-9;
        ++cases;
        exact += ok;
        worst = std::max(worst, err);
        if (m >= freq.front()) {
          ++valid_cases;
          valid_exact += ok;
        }
      }
    });
  }
  return {exact == cases, fmt("unbiased on %zu/%zu (population, m) cases, max |bias| %.3g; "
                              "on m >= largest class: %zu/%zu",
                              exact, cases, worst, valid_exact, valid_cases)};
}

Outcome acceptance_time() {
  bool ok = true;
  std::string detail;
  for (std::size_t ratio : {1, 5, 10}) {
    std::vector<std::size_t> freq(100, 1);
    for (std::size_t e = 0; e < 50; ++e) freq[e] = ratio;
    const auto data = es::synthetic::with_frequencies(freq, ratio);
    const auto map = es::exact_probability_map(data);
    const double expected = es::expected_trials_per_accept(data, map);
    const auto r = es::sample_clean(data, map, 20000, 10 + ratio);
    const double rel = std::abs(r.trials_per_accept() - expected) / expected;
    ok = ok && rel <= 0.1;
    detail += fmt("%sratio %zu: measured %.4f expected %.4f", detail.empty() ? "" : "; ", ratio,
                  r.trials_per_accept(), expected);
  }
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"AC1 exact-uniformity", exact_uniformity},
      {"AC2 balanced-cleanability", balanced_cleanability},
      {"AC3 error-trend", error_trend},
      {"AC4 lsh-recall", lsh_recall},
      {"AC5 clustering-oracle", clustering_oracle},
      {"AC6 ssc-correctness", ssc_correctness},
      {"AC7 em-recovery", em_recovery},
      {"AC8 gmm-sampler-bound", gmm_sampler_bound},
      {"AC9 goodman-unbiasedness", goodman_unbiasedness},
      {"AC10 acceptance-time", acceptance_time},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%.1fs) %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
