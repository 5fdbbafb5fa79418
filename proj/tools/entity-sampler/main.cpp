#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace cli = entity_sampler::cli;

namespace {

void add_source(CLI::App* cmd, cli::DataSource& src) {
  cmd->add_option("-i,--input", src.input, "Dataset CSV");
  cmd->add_option("--schema", src.schema, "Column preset for --input (default: detect from header)");
  cmd->add_option("--synthetic", src.synthetic, "Generate a stand-in for a preset instead of reading a file");
  cmd->add_option("--rows", src.rows, "Rows for --synthetic (default: preset size)");
  cmd->add_option("--data-seed", src.data_seed, "Seed for --synthetic");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample uniformly over entities from data with duplicates"};
  app.require_subcommand(1);
  int code = 0;

  auto* presets = app.add_subcommand("presets", "List known dataset layouts");
  presets->callback([&] { code = cli::run_presets(); });

  cli::IngestArgs ingest;
  auto* ing = app.add_subcommand("ingest", "Load a dataset, print its summary, optionally rewrite it");
  add_source(ing, ingest.source);
  ing->add_option("-o,--output", ingest.output, "Write the dataset in the canonical CSV layout");
  ing->callback([&] { code = cli::run_ingest(ingest); });

  cli::InjectArgs inject;
  auto* inj = app.add_subcommand("inject", "Add duplicate records to a dataset");
  add_source(inj, inject.source);
  inj->add_option("--rate", inject.rate, "Probability that a record is duplicated")->capture_default_str();
  inj->add_option("--profile", inject.profile, "tpch, uniform or arbitrary")->capture_default_str();
  inj->add_option("--max-copies", inject.max_copies, "Copies for uniform/arbitrary profiles")->capture_default_str();
  inj->add_option("--seed", inject.seed)->capture_default_str();
  inj->add_option("-o,--output", inject.output)->required();
  inj->callback([&] { code = cli::run_inject(inject); });

  cli::EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Estimate per-record selection probabilities");
  add_source(e, est.source);
  e->add_option("--method", est.method, "balanced, lsh or gmm")->capture_default_str();
  e->add_option("-o,--output", est.output, "Probability CSV")->required();
  e->add_option("--seed", est.seed)->capture_default_str();
  auto* bal = e->add_option_group("balanced");
  bal->add_option("--m", est.m, "Sample size; overrides the planner");
  bal->add_option("--epsilon", est.epsilon)->capture_default_str();
  bal->add_option("--delta", est.delta)->capture_default_str();
  bal->add_option("--eta", est.eta, "Smallest entity mass; estimated from a sample when omitted");
  bal->add_option("--entities", est.entities, "Entity count used by the planner");
  bal->add_option("--a", est.a, "Planner constant")->capture_default_str();
  bal->add_option("--eta-sample", est.eta_sample, "Records drawn to bound eta (default n/2)");
  auto* lsh = e->add_option_group("lsh");
  lsh->add_option("--lambda", est.lambda, "Duplicate distance threshold")->capture_default_str();
  lsh->add_option("--lsh-delta", est.lsh_delta, "Allowed miss probability")->capture_default_str();
  lsh->add_option("--family", est.family, "minhash or hyperplane")->capture_default_str();
  lsh->add_option("--k-min", est.k_min)->capture_default_str();
  lsh->add_option("--k-max", est.k_max)->capture_default_str();
  lsh->add_option("--pair-budget", est.pair_budget, "Total oracle pair budget")->capture_default_str();
  lsh->add_option("--mu", est.mu, "Prefilter radius")->capture_default_str();
  lsh->add_option("--mu-weight", est.mu_weight, "Weight of the positive-pair loss")->capture_default_str();
  lsh->add_flag("--proportional", est.proportional, "Split the budget by block size");
  lsh->add_option("--oracle", est.oracle, "labels or interactive (y/n on stdin)")->capture_default_str();
  auto* gmm = e->add_option_group("gmm");
  gmm->add_option("--k", est.k, "Mixture components")->capture_default_str();
  gmm->add_option("--iters", est.iterations, "EM iteration cap")->capture_default_str();
  gmm->add_option("--tol", est.tol)->capture_default_str();
  gmm->add_option("--model", est.model_in, "Use this mixture JSON instead of fitting");
  gmm->add_option("--model-out", est.model_out, "Save the mixture as JSON");
  e->callback([&] { code = cli::run_estimate(est); });

  cli::SampleArgs sample;
  auto* s = app.add_subcommand("sample", "Draw records by rejection sampling");
  add_source(s, sample.source);
  s->add_option("--probs", sample.probs, "Probability CSV from estimate");
  s->add_option("--model", sample.model, "Mixture JSON; probabilities from its density");
  s->add_option("-p,--count", sample.p, "Records to accept")->capture_default_str();
  s->add_option("--seed", sample.seed)->capture_default_str();
  s->add_option("--max-trials-factor", sample.max_trials_factor)->capture_default_str();
  s->add_option("-o,--output", sample.output, "Sample CSV");
  s->add_option("--stats", sample.stats, "Statistics JSON (default: stdout)");
  s->callback([&] { code = cli::run_sample(sample); });

  cli::BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run an experiment sweep from a JSON config");
  add_source(b, bench.source);
  b->add_option("-c,--config", bench.config)->required();
  b->add_option("--threads", bench.threads);
  b->add_option("--out-dir", bench.out_dir)->capture_default_str();
  b->add_option("--prefix", bench.prefix)->capture_default_str();
  b->add_option("--baseline", bench.baseline, "CSV with fraction,accuracy[,dup_rate] of a comparison method");
  b->callback([&] { code = cli::run_bench(bench); });

  cli::ReportArgs report;
  auto* r = app.add_subcommand("report", "Re-emit report files from a saved summary JSON");
  r->add_option("--summary", report.summary)->required();
  r->add_option("--out-dir", report.out_dir)->capture_default_str();
  r->add_option("--prefix", report.prefix)->capture_default_str();
  r->add_option("--baseline", report.baseline);
  r->callback([&] { code = cli::run_report(report); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return code;
}
