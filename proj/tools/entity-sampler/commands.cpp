#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "entity_sampler/balanced.hpp"
#include "entity_sampler/csv.hpp"
#include "entity_sampler/distribution.hpp"
#include "entity_sampler/error.hpp"
#include "entity_sampler/experiment.hpp"
#include "entity_sampler/gmm.hpp"
#include "entity_sampler/lsh.hpp"
#include "entity_sampler/lsh_pipeline.hpp"
#include "entity_sampler/rejection_sampler.hpp"
#include "entity_sampler/report.hpp"
#include "entity_sampler/rng.hpp"
#include "presets.hpp"

namespace entity_sampler::cli {

namespace {

using nlohmann::json;

Dataset load(const DataSource& src) {
  Dataset data;
  if (!src.synthetic.empty()) {
    if (!src.input.empty()) throw ConfigError("pass either --input or --synthetic, not both");
    const auto& preset = find_preset(src.synthetic);
    data = synthesize(preset, src.rows ? src.rows : preset.default_rows, src.data_seed);
  } else {
    if (src.input.empty()) throw ConfigError("no dataset: pass --input or --synthetic");
    const CsvSchema schema = src.schema.empty() ? detect_schema(src.input) : find_preset(src.schema).schema;
    data = ingest_csv(src.input, schema);
  }
  for (const auto& w : data.warnings()) std::cerr << "warning: " << w << '\n';
  return data;
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

json describe(const Dataset& data) {
  json j;
  j["rows"] = data.size();
  j["dim"] = data.dim();
  j["text"] = data.has_text();
  j["labelled"] = data.has_labels();
  j["content_classes"] = data.content_class_count();
  if (data.has_labels()) {
    const auto table = EntityTable::from(data);
    j["entities"] = table.size();
    j["eta"] = table.min_prob();
    j["eta_max"] = table.max_prob();
    j["entity_mean_value"] = entity_mean_value(data);
  }
  return j;
}

std::string record_summary(const Dataset& data, std::size_t r) {
  std::ostringstream out;
  out << data.id(r) << ": ";
  if (data.has_text()) {
    out << data.text(r);
  } else {
    for (double v : data.features(r)) out << v << ' ';
  }
  return out.str();
}

// Asks the user on stderr and reads y/n lines from stdin.
OracleFactory interactive_oracle(const Dataset& data) {
  return [&data](std::span<const std::size_t> rows) -> PairOracle {
    std::vector<std::size_t> local(rows.begin(), rows.end());
    return [&data, local](std::size_t x, std::size_t y) {
      while (true) {
        std::cerr << "same entity?\n  " << record_summary(data, local[x]) << "\n  "
                  << record_summary(data, local[y]) << "\n[y/n] " << std::flush;
        std::string line;
        if (!std::getline(std::cin, line)) throw ConvergenceError("oracle input ended");
        if (line == "y" || line == "Y") return true;
        if (line == "n" || line == "N") return false;
      }
    };
  };
}

ProbabilityMap estimate_balanced(const Dataset& data, const EstimateArgs& a, json& info) {
  std::size_t m = 0;
  if (a.m) {
    m = *a.m;
  } else {
    double eta = 0.0;
    if (a.eta) {
      eta = *a.eta;
    } else {
      const std::size_t ms = a.eta_sample ? *a.eta_sample : std::max<std::size_t>(1, data.size() / 2);
      const auto est = estimate_eta(data, ms, derive_seed(a.seed, {1}));
      if (est.entities.unstable)
        std::cerr << "warning: entity-count estimate is numerically unstable (largest term "
                  << est.entities.max_term << ")\n";
      eta = est.eta_bound;
      info["eta_sample"] = ms;
      info["entities_estimate"] = est.entities.value;
      info["eta_bound"] = eta;
    }
    const auto plan = plan_sample_size(a.epsilon, a.delta, eta, a.entities, a.a);
    info["plan"] = {{"epsilon", plan.epsilon}, {"delta", plan.delta}, {"eta", plan.eta},
                    {"entity_count", plan.entity_count}, {"m_exact", plan.m_exact}, {"m", plan.m}};
    m = plan.m;
  }
  info["m"] = m;
  return estimate_probs_balanced(data, m, derive_seed(a.seed, {0}));
}

ProbabilityMap estimate_lsh(const Dataset& data, const EstimateArgs& a, json& info) {
  HashFamily family;
  if (a.family == "minhash") family = HashFamily::kMinHash;
  else if (a.family == "hyperplane") family = HashFamily::kHyperplane;
  else throw ConfigError("unknown hash family '" + a.family + "' (minhash, hyperplane)");
  const auto cfg = choose_bands_rows(a.lambda, a.lsh_delta, family);
  const auto blocking = lsh_partition(data, cfg, derive_seed(a.seed, {0}));

  LshPipelineOptions opts;
  opts.mu_radius = a.mu;
  opts.k_range = {a.k_min, a.k_max};
  opts.budget = a.pair_budget;
  opts.proportional_split = a.proportional;
  opts.mu_weight = a.mu_weight;

  OracleFactory oracle;
  if (a.oracle == "labels") {
    if (!data.has_labels()) throw ConfigError("the labels oracle needs an entity column");
    oracle = labels_oracle_factory(data);
  } else if (a.oracle == "interactive") {
    oracle = interactive_oracle(data);
  } else {
    throw ConfigError("unknown oracle '" + a.oracle + "' (labels, interactive)");
  }
  auto est = estimate_probs_lsh(data, blocking, opts, oracle, derive_seed(a.seed, {1}));
  info["bands"] = {{"r", cfg.r}, {"s", cfg.s}};
  info["blocks"] = blocking.q();
  info["oracle_queries"] = est.total_queries;
  json blocks = json::array();
  for (const auto& b : est.blocks)
    blocks.push_back({{"block", b.block}, {"size", b.size}, {"survivors", b.survivors},
                      {"k", b.k_selected}, {"queries", b.queries}, {"loss", b.loss},
                      {"exhaustive", b.exhaustive}, {"partial", b.partial}});
  info["clustered_blocks"] = std::move(blocks);
  return std::move(est.map);
}

ProbabilityMap estimate_gmm(const Dataset& data, const EstimateArgs& a, json& info) {
  MixtureModel model;
  if (!a.model_in.empty()) {
    model = MixtureModel::load(a.model_in);
  } else {
    EmOptions opts;
    opts.iterations = a.iterations;
    opts.tol = a.tol;
    auto fit = em_fit(data, a.k, opts, a.seed);
    warn_all(fit.warnings);
    info["iterations"] = fit.iterations;
    info["restarts"] = fit.restarts;
    info["converged"] = fit.converged;
    if (!fit.log_likelihood.empty()) info["log_likelihood"] = fit.log_likelihood.back();
    model = std::move(fit.model);
  }
  if (!a.model_out.empty()) model.save(a.model_out);
  info["model"] = json::parse(model.to_json());
  return estimate_probs_gmm(data, model);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

}  // namespace

int run_presets() {
  for (const auto& p : presets()) std::cout << p.name << "\t" << p.description << '\n';
  return 0;
}

int run_ingest(const IngestArgs& args) {
  const Dataset data = load(args.source);
  if (!args.output.empty()) write_dataset_csv(args.output, data);
  std::cout << describe(data).dump(2) << '\n';
  return 0;
}

int run_inject(const InjectArgs& args) {
  const Dataset data = load(args.source);
  DupProfile profile;
  profile.kind = parse_dup_kind(args.profile);
  profile.max_copies = args.max_copies;
  const Dataset out = inject_duplicates(data, args.rate, profile, args.seed);
  if (args.output.empty()) throw ConfigError("inject needs --output");
  write_dataset_csv(args.output, out);
  json j = describe(out);
  j["added"] = out.size() - data.size();
  std::cout << j.dump(2) << '\n';
  return 0;
}

int run_estimate(const EstimateArgs& args) {
  const Dataset data = load(args.source);
  json info;
  info["method"] = args.method;
  ProbabilityMap map;
  const Method method = parse_method(args.method);
  if (method == Method::kBalanced) map = estimate_balanced(data, args, info);
  else if (method == Method::kLsh) map = estimate_lsh(data, args, info);
  else map = estimate_gmm(data, args, info);
  warn_all(map.warnings());
  if (args.output.empty()) throw ConfigError("estimate needs --output");
  write_probability_csv(args.output, data, map);
  info["floor"] = map.floor();
  info["expected_trials_per_accept"] = expected_trials_per_accept(data, map);
  if (data.has_labels()) info["induced_tv"] = induced_tv_to_uniform(data, map);
  std::cout << info.dump(2) << '\n';
  return 0;
}

int run_sample(const SampleArgs& args) {
  const Dataset data = load(args.source);
  if (args.probs.empty() == args.model.empty())
    throw ConfigError("sample needs exactly one of --probs and --model");
  ProbabilityMap map = args.probs.empty() ? estimate_probs_gmm(data, MixtureModel::load(args.model))
                                          : read_probability_csv(args.probs, data);
  warn_all(map.warnings());
  SamplerOptions opts;
  opts.max_trials_factor = args.max_trials_factor;
  const auto res = sample_clean(data, map, args.p, args.seed, opts);

  double sum = 0.0;
  for (auto r : res.accepted) sum += data.value(r);
  json stats;
  stats["p"] = res.accepted.size();
  stats["trials"] = res.trials;
  stats["acceptance_rate"] = res.acceptance_rate();
  stats["trials_per_accept"] = res.trials_per_accept();
  stats["expected_trials_per_accept"] = expected_trials_per_accept(data, map);
  stats["sample_mean"] = sum / static_cast<double>(res.accepted.size());
  if (data.has_labels()) {
    const double clean = entity_mean_value(data);
    stats["entity_mean_value"] = clean;
    if (clean != 0.0) stats["relative_error"] = relative_error(clean, sum / static_cast<double>(res.accepted.size()));
    stats["induced_tv"] = induced_tv_to_uniform(data, map);
  }

  if (!args.output.empty()) {
    auto out = open_out(args.output);
    csv::write_row(out, data.has_labels() ? std::vector<std::string>{"draw", "record_id", "entity", "value"}
                                          : std::vector<std::string>{"draw", "record_id", "value"});
    for (std::size_t i = 0; i < res.accepted.size(); ++i) {
      const auto r = res.accepted[i];
      std::vector<std::string> row{std::to_string(i), data.id(r)};
      if (data.has_labels()) row.push_back(data.entity_name(data.entity_of(r)));
      row.push_back(csv::format_double(data.value(r)));
      csv::write_row(out, row);
    }
  }
  if (args.stats.empty()) {
    std::cout << stats.dump(2) << '\n';
  } else {
    open_out(args.stats) << stats.dump(2) << '\n';
  }
  return 0;
}

int run_bench(const BenchArgs& args) {
  std::ifstream in(args.config);
  if (!in) throw ConfigError("cannot open " + args.config);
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentSpec spec = parse_experiment_json(ss.str());
  if (args.threads) spec.threads = *args.threads;

  DataSource src = args.source;
  if (src.input.empty() && src.synthetic.empty()) {
    if (spec.dataset.empty()) throw ConfigError("no dataset: set \"dataset\" in the config or pass --input");
    src.input = spec.dataset;
  }
  const Dataset data = load(src);
  const auto report = run_experiment(data, spec);
  ReportOptions opts;
  opts.prefix = args.prefix;
  if (!args.baseline.empty()) opts.baseline_csv = args.baseline;
  for (const auto& p : emit_report(report, args.out_dir, opts)) std::cout << p.string() << '\n';
  for (const auto& c : report.cells)
    for (const auto& e : c.errors)
      std::cerr << "error: dup=" << c.dup_rate << " fraction=" << c.fraction << ": " << e << '\n';
  return report.total_failures() == 0 ? 0 : 3;
}

int run_report(const ReportArgs& args) {
  std::ifstream in(args.summary);
  if (!in) throw ConfigError("cannot open " + args.summary);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto report = report_from_json(ss.str());
  ReportOptions opts;
  opts.prefix = args.prefix;
  if (!args.baseline.empty()) opts.baseline_csv = args.baseline;
  for (const auto& p : emit_report(report, args.out_dir, opts)) std::cout << p.string() << '\n';
  return 0;
}

}  // namespace entity_sampler::cli
