#include "entity_sampler/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include <json.hpp>

#include "entity_sampler/balanced.hpp"
#include "entity_sampler/error.hpp"
#include "entity_sampler/gmm.hpp"
#include "entity_sampler/lsh.hpp"
#include "entity_sampler/lsh_pipeline.hpp"
#include "entity_sampler/rejection_sampler.hpp"
#include "entity_sampler/rng.hpp"

namespace entity_sampler {

std::vector<double> DupProfile::copy_probs(std::uint64_t seed) const {
  switch (kind) {
    case DupKind::kTpch:
      return {0.80, 0.15, 0.05};
    case DupKind::kUniform:
      if (max_copies == 0) throw ConfigError("max_copies must be at least 1");
      return std::vector<double>(max_copies, 1.0 / static_cast<double>(max_copies));
    case DupKind::kArbitrary: {
      if (max_copies == 0) throw ConfigError("max_copies must be at least 1");
      Rng rng(derive_seed(seed, {0xA7B1ULL}));
      std::exponential_distribution<double> ex(1.0);
      std::vector<double> p(max_copies);
      double total = 0.0;
      for (double& v : p) total += (v = ex(rng));
      for (double& v : p) v /= total;
      return p;
    }
  }
  return {};
}

DupKind parse_dup_kind(const std::string& name) {
  if (name == "tpch") return DupKind::kTpch;
  if (name == "uniform") return DupKind::kUniform;
  if (name == "arbitrary") return DupKind::kArbitrary;
  throw ConfigError("unknown duplication profile '" + name + "' (tpch, uniform, arbitrary)");
}

std::string to_string(DupKind kind) {
  switch (kind) {
    case DupKind::kTpch: return "tpch";
    case DupKind::kUniform: return "uniform";
    case DupKind::kArbitrary: return "arbitrary";
  }
  return "?";
}

Dataset inject_duplicates(const Dataset& data, double rate, const DupProfile& profile,
                          std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("duplication rate must be in [0,1)");
  const auto probs = profile.copy_probs(seed);
  Rng rng(seed);
  std::bernoulli_distribution pick(rate);
  std::discrete_distribution<std::size_t> copies(probs.begin(), probs.end());
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!pick(rng)) continue;
    const std::size_t c = copies(rng) + 1;
    for (std::size_t t = 0; t < c; ++t) rows.push_back(i);
  }
  return data.select_rows(rows);
}

Method parse_method(const std::string& name) {
  if (name == "balanced") return Method::kBalanced;
  if (name == "lsh") return Method::kLsh;
  if (name == "gmm") return Method::kGmm;
  throw ConfigError("unknown method '" + name + "' (balanced, lsh, gmm)");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kBalanced: return "balanced";
    case Method::kLsh: return "lsh";
    case Method::kGmm: return "gmm";
  }
  return "?";
}

void ExperimentSpec::validate() const {
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("sample fractions must be in (0,1]");
  for (double r : dup_rates)
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("duplication rates must be in [0,1)");
  if (repeats == 0) throw ConfigError("repeats must be at least 1");
  if (threads == 0) throw ConfigError("threads must be at least 1");
  if (!(bound_delta > 0.0 && bound_delta < 1.0)) throw ConfigError("bound_delta must be in (0,1)");
  if (!(a > 0.0)) throw ConfigError("a must be positive");
  if (method == Method::kGmm && gmm_k == 0) throw ConfigError("gmm k must be positive");
}

ExperimentSpec parse_experiment_json(const std::string& text) {
  ExperimentSpec s;
  try {
    const auto j = nlohmann::json::parse(text, nullptr, true, true);
    if (j.contains("dataset")) s.dataset = j["dataset"].get<std::string>();
    if (j.contains("method")) s.method = parse_method(j["method"].get<std::string>());
    if (j.contains("fractions")) s.fractions = j["fractions"].get<std::vector<double>>();
    if (j.contains("dup_rates")) s.dup_rates = j["dup_rates"].get<std::vector<double>>();
    s.repeats = j.value("repeats", s.repeats);
    s.seed = j.value("seed", s.seed);
    if (j.contains("profile")) s.profile.kind = parse_dup_kind(j["profile"].get<std::string>());
    s.profile.max_copies = j.value("max_copies", s.profile.max_copies);
    s.threads = j.value("threads", s.threads);
    s.bound_delta = j.value("bound_delta", s.bound_delta);
    s.a = j.value("a", s.a);
    s.lambda = j.value("lambda", s.lambda);
    s.lsh_delta = j.value("lsh_delta", s.lsh_delta);
    s.mu_radius = j.value("mu", s.mu_radius);
    s.k_min = j.value("k_min", s.k_min);
    s.k_max = j.value("k_max", s.k_max);
    s.proportional_split = j.value("proportional_split", s.proportional_split);
    s.gmm_k = j.value("k", s.gmm_k);
    s.gmm_iterations = j.value("iterations", s.gmm_iterations);
    s.gmm_tol = j.value("tol", s.gmm_tol);
    s.c_prime = j.value("c_prime", s.c_prime);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid experiment config: ") + e.what());
  }
  s.validate();
  return s;
}

std::string experiment_to_json(const ExperimentSpec& s) {
  nlohmann::json j;
  j["dataset"] = s.dataset;
  j["method"] = to_string(s.method);
  j["fractions"] = s.fractions;
  j["dup_rates"] = s.dup_rates;
  j["repeats"] = s.repeats;
  j["seed"] = s.seed;
  j["profile"] = to_string(s.profile.kind);
  j["max_copies"] = s.profile.max_copies;
  j["bound_delta"] = s.bound_delta;
  j["a"] = s.a;
  if (s.method == Method::kLsh) {
    j["lambda"] = s.lambda;
    j["lsh_delta"] = s.lsh_delta;
    j["mu"] = s.mu_radius;
    j["k_min"] = s.k_min;
    j["k_max"] = s.k_max;
    j["proportional_split"] = s.proportional_split;
  }
  if (s.method == Method::kGmm) {
    j["k"] = s.gmm_k;
    j["iterations"] = s.gmm_iterations;
    j["tol"] = s.gmm_tol;
    j["c_prime"] = s.c_prime;
  }
  return j.dump(2);
}

std::size_t SampleReport::total_failures() const {
  std::size_t f = 0;
  for (const auto& c : cells) f += c.failures;
  return f;
}

namespace {

struct Trial {
  bool ok = false;
  double error = 0.0;
  double naive_error = 0.0;
  double tv = 0.0;
  double acceptance = 0.0;
  double trials_per_accept = 0.0;
  double bound = 0.0;
  double seconds = 0.0;
  std::string message;
};

double sample_mean(const Dataset& data, const std::vector<std::size_t>& rows) {
  double s = 0.0;
  for (auto r : rows) s += data.value(r);
  return s / static_cast<double>(rows.size());
}

// Smallest epsilon whose GMM plan fits in m samples (T depends on epsilon).
double gmm_epsilon_for(std::size_t m, double delta, double tau, double eta_min, std::size_t d,
                       std::size_t k, double c_prime) {
  auto need = [&](double eps) { return plan_gmm(eps, delta, tau, eta_min, d, k, c_prime).m_exact; };
  if (need(0.999999) > static_cast<double>(m)) return 1.0;
  double lo = 1e-9, hi = 0.999999;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (need(mid) > static_cast<double>(m)) lo = mid;
    else hi = mid;
  }
  return hi;
}

Trial run_cell(const Dataset& data, const ExperimentSpec& spec, std::size_t m, double clean_mean,
               std::uint64_t seed) {
  Trial t;
  const auto start = std::chrono::steady_clock::now();
  try {
    ProbabilityMap map;
    switch (spec.method) {
      case Method::kBalanced: {
        map = estimate_probs_balanced(data, m, derive_seed(seed, {1}));
        const auto table = EntityTable::from(data);
        t.bound = balanced_epsilon_for(m, spec.bound_delta, table.min_prob(), table.size(), spec.a);
        break;
      }
      case Method::kLsh: {
        const HashFamily fam = data.has_tokens() ? HashFamily::kMinHash : HashFamily::kHyperplane;
        const auto cfg = choose_bands_rows(spec.lambda, spec.lsh_delta, fam);
        const auto blocking = lsh_partition(data, cfg, derive_seed(seed, {2}));
        LshPipelineOptions o;
        o.mu_radius = spec.mu_radius;
        o.k_range = {spec.k_min, spec.k_max};
        o.budget = m;
        o.proportional_split = spec.proportional_split;
        auto est = estimate_probs_lsh(data, blocking, o, labels_oracle_factory(data),
                                      derive_seed(seed, {3}));
        map = std::move(est.map);
        double q = 0.0, s = 1.0;
        for (const auto& b : est.blocks) {
          q += 1.0;
          s = std::max(s, static_cast<double>(b.candidates));
        }
        q = std::max(q, 1.0);
        t.bound = std::min(1.0, std::sqrt(spec.a * q * (std::log(s) + std::log(2.0 * q / spec.bound_delta)) /
                                          static_cast<double>(m)));
        break;
      }
      case Method::kGmm: {
        if (!data.has_vectors()) throw ConfigError("gmm needs feature vectors");
        const std::size_t n = data.size();
        const std::size_t fit_n = std::min(m, n);
        // Fit on a uniform without-replacement sample of size m.
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        Rng rng(derive_seed(seed, {4}));
        for (std::size_t i = 0; i < fit_n; ++i) {
          std::uniform_int_distribution<std::size_t> pick(i, n - 1);
          std::swap(idx[i], idx[pick(rng)]);
        }
        std::vector<double> pts;
        pts.reserve(fit_n * data.dim());
        for (std::size_t i = 0; i < fit_n; ++i) {
          const auto f = data.features(idx[i]);
          pts.insert(pts.end(), f.begin(), f.end());
        }
        EmOptions eo;
        eo.iterations = spec.gmm_iterations;
        eo.tol = spec.gmm_tol;
        const auto fit = em_fit(pts, data.dim(), std::min(spec.gmm_k, fit_n), eo, derive_seed(seed, {5}));
        map = estimate_probs_gmm(data, fit.model);
        double log_tau = INFINITY;
        for (std::size_t i = 0; i < n; ++i) log_tau = std::min(log_tau, gmm_log_density(fit.model, data.features(i)));
        const double eta_min = *std::min_element(fit.model.weights.begin(), fit.model.weights.end());
        t.bound = gmm_epsilon_for(m, spec.bound_delta, std::exp(log_tau), eta_min, data.dim(),
                                  fit.model.k, spec.c_prime);
        break;
      }
    }
    const auto res = sample_clean(data, map, m, derive_seed(seed, {6}));
    t.error = relative_error(clean_mean, sample_mean(data, res.accepted));
    t.acceptance = res.acceptance_rate();
    t.trials_per_accept = res.trials_per_accept();
    t.tv = induced_tv_to_uniform(data, map);

    Rng rng(derive_seed(seed, {7}));
    std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
    std::vector<std::size_t> naive(m);
    for (auto& r : naive) r = pick(rng);
    t.naive_error = relative_error(clean_mean, sample_mean(data, naive));
    t.ok = true;
  } catch (const std::exception& e) {
    t.message = e.what();
  }
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return t;
}

}  // namespace

SampleReport run_experiment(const Dataset& clean, const ExperimentSpec& spec) {
  spec.validate();
  if (clean.empty()) throw DomainError("empty dataset");
  const auto start = std::chrono::steady_clock::now();

  SampleReport report;
  report.spec = spec;
  report.clean_size = clean.size();
  report.clean_mean = entity_mean_value(clean);

  const std::size_t nf = spec.fractions.size();
  const std::size_t nd = spec.dup_rates.size();
  const std::size_t units = nd * spec.repeats;
  std::vector<Trial> trials(nd * nf * spec.repeats);
  std::vector<std::size_t> ms(nf);
  for (std::size_t f = 0; f < nf; ++f)
    ms[f] = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(spec.fractions[f] * static_cast<double>(clean.size()))));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t u = next++; u < units; u = next++) {
      const std::size_t di = u / spec.repeats;
      const std::size_t rep = u % spec.repeats;
      Dataset injected;
      std::string inject_error;
      try {
        injected = inject_duplicates(clean, spec.dup_rates[di], spec.profile,
                                     derive_seed(spec.seed, {di, rep}));
      } catch (const std::exception& e) {
        inject_error = e.what();
      }
      for (std::size_t f = 0; f < nf; ++f) {
        Trial& t = trials[(di * nf + f) * spec.repeats + rep];
        if (!inject_error.empty()) {
          t.message = inject_error;
          continue;
        }
        const std::uint64_t cell_seed = derive_seed(spec.seed ^ 0x5eedULL, {di * nf + f, rep});
        t = run_cell(injected, spec, ms[f], report.clean_mean, cell_seed);
      }
    }
  };
  const std::size_t nthreads = std::min(spec.threads, std::max<std::size_t>(units, 1));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t di = 0; di < nd; ++di)
    for (std::size_t f = 0; f < nf; ++f) {
      CellResult c;
      c.dup_rate = spec.dup_rates[di];
      c.fraction = spec.fractions[f];
      c.m = ms[f];
      std::vector<double> errs;
      std::set<std::string> messages;
      for (std::size_t rep = 0; rep < spec.repeats; ++rep) {
        const Trial& t = trials[(di * nf + f) * spec.repeats + rep];
        c.seconds += t.seconds;
        if (!t.ok) {
          ++c.failures;
          messages.insert(t.message);
          continue;
        }
        errs.push_back(t.error);
        c.mean_naive_error += t.naive_error;
        c.mean_tv += t.tv;
        c.mean_acceptance += t.acceptance;
        c.mean_trials_per_accept += t.trials_per_accept;
        c.mean_bound += t.bound;
      }
      c.ok_repeats = errs.size();
      if (!errs.empty()) {
        const double k = static_cast<double>(errs.size());
        c.mean_error = std::accumulate(errs.begin(), errs.end(), 0.0) / k;
        double ss = 0.0;
        for (double e : errs) ss += (e - c.mean_error) * (e - c.mean_error);
        c.stderr_error = errs.size() > 1 ? std::sqrt(ss / (k - 1.0)) / std::sqrt(k) : 0.0;
        c.mean_naive_error /= k;
        c.mean_tv /= k;
        c.mean_acceptance /= k;
        c.mean_trials_per_accept /= k;
        c.mean_bound /= k;
      }
      c.errors.assign(messages.begin(), messages.end());
      report.cells.push_back(std::move(c));
    }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace entity_sampler
