#include "entity_sampler/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "entity_sampler/error.hpp"
#include "entity_sampler/rng.hpp"

namespace entity_sampler {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_sum_exp(std::span<const double> v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t t = 0; t < d; ++t) s += (a[t] - b[t]) * (a[t] - b[t]);
  return s;
}

// log η_j + log N(x; μ_j, σ_j² I) for every component.
void component_logs(const MixtureModel& m, const double* x, double* out) {
  const double dd = static_cast<double>(m.d);
  for (std::size_t j = 0; j < m.k; ++j) {
    const double v = m.variances[j];
    out[j] = std::log(m.weights[j]) - 0.5 * dd * (kLog2Pi + std::log(v)) -
             sq_dist(x, m.means.data() + j * m.d, m.d) / (2.0 * v);
  }
}

MixtureModel initialize(std::span<const double> points, std::size_t n, std::size_t d,
                        std::size_t k, std::size_t subsample, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t s = std::min(n, std::max(subsample, k));
  for (std::size_t i = 0; i < s; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(s);

  MixtureModel m;
  m.k = k;
  m.d = d;
  m.weights.assign(k, 1.0 / static_cast<double>(k));
  m.means.resize(k * d);
  m.variances.assign(k, 1.0);

  std::vector<double> best(s, std::numeric_limits<double>::infinity());
  std::size_t chosen = idx[uniform_index(rng, s)];
  for (std::size_t j = 0; j < k; ++j) {
    std::copy_n(points.data() + chosen * d, d, m.means.data() + j * d);
    double total = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      best[i] = std::min(best[i], sq_dist(points.data() + idx[i] * d, m.means.data() + j * d, d));
      total += best[i];
    }
    if (j + 1 == k) break;
    if (total <= 0.0) {
      chosen = idx[uniform_index(rng, s)];
      continue;
    }
    double u = uniform01(rng) * total;
    chosen = idx[s - 1];
    for (std::size_t i = 0; i < s; ++i) {
      u -= best[i];
      if (u < 0.0 && best[i] > 0.0) { chosen = idx[i]; break; }
    }
  }
  double pooled = 0.0;
  for (double b : best) pooled += b;
  pooled /= static_cast<double>(s) * static_cast<double>(d);
  if (!(pooled > 0.0)) {
    // Fall back to the total variance of the subsample.
    std::vector<double> mu(d, 0.0);
    for (auto i : idx)
      for (std::size_t t = 0; t < d; ++t) mu[t] += points[i * d + t] / static_cast<double>(s);
    for (auto i : idx) pooled += sq_dist(points.data() + i * d, mu.data(), d);
    pooled /= static_cast<double>(s) * static_cast<double>(d);
  }
  m.variances.assign(k, pooled);
  return m;
}

}  // namespace

void MixtureModel::validate() const {
  if (k == 0 || d == 0) throw ConfigError("mixture needs k >= 1 and d >= 1");
  if (weights.size() != k || variances.size() != k || means.size() != k * d)
    throw ConfigError("mixture parameter sizes do not match k and d");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("mixture weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mixture weights must sum to 1");
  for (double v : variances)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("mixture variances must be positive");
  for (double x : means)
    if (!std::isfinite(x)) throw ConfigError("mixture means must be finite");
}

std::string MixtureModel::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["d"] = d;
  j["weights"] = weights;
  j["variances"] = variances;
  auto ms = nlohmann::json::array();
  for (std::size_t i = 0; i < k; ++i) ms.push_back(std::vector<double>(mean(i).begin(), mean(i).end()));
  j["means"] = ms;
  return j.dump(2);
}

MixtureModel MixtureModel::from_json(const std::string& text) {
  MixtureModel m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.weights = j.at("weights").get<std::vector<double>>();
    m.variances = j.at("variances").get<std::vector<double>>();
    const auto ms = j.at("means").get<std::vector<std::vector<double>>>();
    m.k = m.weights.size();
    m.d = ms.empty() ? 0 : ms.front().size();
    if (j.contains("k") && j["k"].get<std::size_t>() != m.k) throw ConfigError("k does not match weights");
    if (j.contains("d") && j["d"].get<std::size_t>() != m.d) throw ConfigError("d does not match means");
    if (ms.size() != m.k) throw ConfigError("number of means does not match weights");
    for (const auto& row : ms) {
      if (row.size() != m.d) throw ConfigError("means have inconsistent dimensions");
      m.means.insert(m.means.end(), row.begin(), row.end());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid mixture JSON: ") + e.what());
  }
  m.validate();
  return m;
}

void MixtureModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << to_json() << '\n';
}

MixtureModel MixtureModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

double gmm_log_density(const MixtureModel& model, std::span<const double> x) {
  if (x.size() != model.d) throw ConfigError("point dimension does not match the mixture");
  std::vector<double> logs(model.k);
  component_logs(model, x.data(), logs.data());
  return log_sum_exp(logs);
}

double gmm_density(const MixtureModel& model, std::span<const double> x) {
  return std::exp(gmm_log_density(model, x));
}

EmResult em_fit(std::span<const double> points, std::size_t d, std::size_t k,
                const EmOptions& opts, std::uint64_t seed) {
  if (k == 0) throw ConfigError("EM needs k >= 1");
  if (d == 0 || points.size() % d != 0) throw ConfigError("EM needs d-dimensional points");
  const std::size_t n = points.size() / d;
  if (n < k) throw ConfigError("EM needs at least k points");
  const double dd = static_cast<double>(d);

  EmResult res;
  {
    // Zero spread: every component sits on the single point.
    bool constant = true;
    for (std::size_t i = 1; i < n && constant; ++i)
      constant = sq_dist(points.data(), points.data() + i * d, d) == 0.0;
    if (constant) {
      res.model.k = k;
      res.model.d = d;
      res.model.weights.assign(k, 1.0 / static_cast<double>(k));
      res.model.variances.assign(k, 1.0);
      for (std::size_t j = 0; j < k; ++j)
        res.model.means.insert(res.model.means.end(), points.begin(), points.begin() + static_cast<std::ptrdiff_t>(d));
      res.warnings.push_back("all points coincide; variances set to 1");
      res.converged = true;
      return res;
    }
  }

  std::vector<double> logs(n * k);
  std::vector<double> nk(k), sum(k * d), ss(k);
  for (std::size_t attempt = 0; attempt <= opts.max_restarts; ++attempt) {
    Rng rng(derive_seed(seed, {attempt}));
    MixtureModel m = initialize(points, n, d, k, opts.init_subsample, rng);
    std::vector<double> history;
    bool collapsed = false, converged = false;
    std::size_t it = 0;
    for (; it < opts.iterations; ++it) {
      // E-step: responsibilities, stored in `logs` as probabilities.
      double ll = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double* row = logs.data() + i * k;
        component_logs(m, points.data() + i * d, row);
        const double lse = log_sum_exp(std::span<const double>(row, k));
        ll += lse;
        for (std::size_t j = 0; j < k; ++j) row[j] = std::exp(row[j] - lse);
      }
      history.push_back(ll);

      // M-step.
      std::fill(nk.begin(), nk.end(), 0.0);
      std::fill(sum.begin(), sum.end(), 0.0);
      std::fill(ss.begin(), ss.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double* x = points.data() + i * d;
        for (std::size_t j = 0; j < k; ++j) {
          const double r = logs[i * k + j];
          nk[j] += r;
          for (std::size_t t = 0; t < d; ++t) sum[j * d + t] += r * x[t];
        }
      }
      MixtureModel next = m;
      for (std::size_t j = 0; j < k; ++j) {
        next.weights[j] = nk[j] / static_cast<double>(n);
        if (nk[j] > 0.0)
          for (std::size_t t = 0; t < d; ++t) next.means[j * d + t] = sum[j * d + t] / nk[j];
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double* x = points.data() + i * d;
        for (std::size_t j = 0; j < k; ++j)
          ss[j] += logs[i * k + j] * sq_dist(x, next.means.data() + j * d, d);
      }
      for (std::size_t j = 0; j < k; ++j) {
        next.variances[j] = nk[j] > 0.0 ? ss[j] / (nk[j] * dd) : 0.0;
        if (next.weights[j] < opts.collapse_threshold || next.variances[j] < opts.collapse_threshold)
          collapsed = true;
      }
      if (collapsed) break;

      double change = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        change += std::abs(next.weights[j] - m.weights[j]) + std::abs(next.variances[j] - m.variances[j]);
        for (std::size_t t = 0; t < d; ++t) change += std::abs(next.means[j * d + t] - m.means[j * d + t]);
      }
      m = std::move(next);
      if (change < opts.tol) {
        converged = true;
        ++it;
        break;
      }
    }
    if (collapsed) {
      res.warnings.push_back("EM component collapsed; restarting (attempt " + std::to_string(attempt + 1) + ")");
      continue;
    }
    double ll = 0.0;
    std::vector<double> row(k);
    for (std::size_t i = 0; i < n; ++i) {
      component_logs(m, points.data() + i * d, row.data());
      ll += log_sum_exp(row);
    }
    history.push_back(ll);
    // Renormalize against rounding drift.
    const double wsum = std::accumulate(m.weights.begin(), m.weights.end(), 0.0);
    for (double& w : m.weights) w /= wsum;
    res.model = std::move(m);
    res.log_likelihood = std::move(history);
    res.iterations = it;
    res.restarts = attempt;
    res.converged = converged;
    return res;
  }
  throw ConvergenceError("EM collapsed on every one of " + std::to_string(opts.max_restarts + 1) +
                         " attempts");
}

EmResult em_fit(const Dataset& data, std::size_t k, const EmOptions& opts, std::uint64_t seed) {
  if (!data.has_vectors()) throw ConfigError("EM needs feature vectors");
  return em_fit(data.feature_matrix(), data.dim(), k, opts, seed);
}

ProbabilityMap estimate_probs_gmm(const Dataset& data, const MixtureModel& model) {
  model.validate();
  if (!data.has_vectors()) throw ConfigError("the gmm estimator needs feature vectors");
  if (data.dim() != model.d) throw ConfigError("dataset dimension does not match the mixture");
  const std::size_t n = data.size();
  if (n == 0) throw DomainError("empty dataset");
  std::vector<double> logn(n);
  for (std::size_t i = 0; i < n; ++i) {
    logn[i] = gmm_log_density(model, data.features(i));
    if (!(logn[i] >= -700.0))
      throw DomainError("log-density " + std::to_string(logn[i]) + " at record '" + data.id(i) +
                        "' underflows; rescale the data");
  }
  const double lse = log_sum_exp(logn);
  std::vector<double> phat(n);
  for (std::size_t i = 0; i < n; ++i) {
    phat[i] = std::min(1.0, std::exp(logn[i] - lse));
    if (!(phat[i] > 0.0))
      throw DomainError("normalized density underflows at record '" + data.id(i) + "'; rescale the data");
  }
  ProbabilityMap map(std::move(phat), "gmm");
  for (const auto& [i, j] : separation_violations(model))
    map.warnings().push_back("components " + std::to_string(i) + " and " + std::to_string(j) +
                             " are not well separated");
  return map;
}

GmmPlan plan_gmm(double epsilon, double delta, double tau, double eta_min, std::size_t d,
                 std::size_t k, double c_prime, double c_t) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must be in (0,1)");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive");
  if (!(eta_min > 0.0 && eta_min <= 1.0)) throw ConfigError("eta_min must be in (0,1]");
  if (d == 0 || k == 0) throw ConfigError("d and k must be positive");
  if (!(c_prime > 0.0) || !(c_t > 0.0)) throw ConfigError("planner constants must be positive");
  GmmPlan p;
  p.epsilon = epsilon;
  p.delta = delta;
  p.tau = tau;
  p.eta_min = eta_min;
  p.d = d;
  p.k = k;
  p.c_prime = c_prime;
  p.c_t = c_t;
  const double t = std::ceil(c_t * std::log(1.0 / (tau * epsilon)) - 1e-12);
  p.T = static_cast<std::size_t>(std::max(1.0, t));
  const double dd = static_cast<double>(d);
  const double kk = static_cast<double>(k);
  p.m_exact = c_prime * dd * dd * dd *
              (std::log(kk * kk * static_cast<double>(p.T)) + std::log(1.0 / delta)) /
              (eta_min * tau * tau * epsilon * epsilon);
  p.m = static_cast<std::size_t>(std::max(1.0, std::ceil(p.m_exact)));
  return p;
}

std::vector<std::pair<std::size_t, std::size_t>> separation_violations(const MixtureModel& model) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (model.k < 2) return out;
  const auto [smin, smax] = std::minmax_element(model.variances.begin(), model.variances.end());
  const double rho = std::sqrt(*smax / *smin);
  const double eta_min = *std::min_element(model.weights.begin(), model.weights.end());
  const double factor = std::sqrt(std::max(0.0, std::log(rho / eta_min)));
  for (std::size_t i = 0; i < model.k; ++i)
    for (std::size_t j = i + 1; j < model.k; ++j) {
      const double sep = std::sqrt(sq_dist(model.means.data() + i * model.d,
                                           model.means.data() + j * model.d, model.d));
      const double need = std::sqrt(std::max(model.variances[i], model.variances[j])) * factor;
      if (sep < need) out.emplace_back(i, j);
    }
  return out;
}

}  // namespace entity_sampler
