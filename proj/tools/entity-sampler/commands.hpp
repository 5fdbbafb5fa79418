#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace entity_sampler::cli {

// Where a command's dataset comes from: a CSV file (schema from a preset
// or detected from the header) or a synthetic stand-in.
struct DataSource {
  std::string input;
  std::string schema;     // preset name; empty = detect from header
  std::string synthetic;  // preset name
  std::size_t rows = 0;   // 0 = preset default
  std::uint64_t data_seed = 1;
};

struct IngestArgs {
  DataSource source;
  std::string output;
};

struct InjectArgs {
  DataSource source;
  double rate = 0.2;
  std::string profile = "tpch";
  std::size_t max_copies = 3;
  std::uint64_t seed = 1;
  std::string output;
};

struct EstimateArgs {
  DataSource source;
  std::string method = "balanced";
  std::string output;
  std::uint64_t seed = 1;
  // balanced
  std::optional<std::size_t> m;
  double epsilon = 0.1;
  double delta = 0.1;
  std::optional<double> eta;
  std::optional<std::size_t> entities;
  double a = 1.0;
  std::optional<std::size_t> eta_sample;
  // lsh
  double lambda = 0.2;
  double lsh_delta = 0.1;
  std::string family = "minhash";
  std::size_t k_min = 1;
  std::size_t k_max = 8;
  std::size_t pair_budget = 1000;
  double mu = 0.2;
  double mu_weight = 0.5;
  bool proportional = false;
  std::string oracle = "labels";
  // gmm
  std::size_t k = 2;
  std::size_t iterations = 100;
  double tol = 1e-6;
  std::string model_in;
  std::string model_out;
};

struct SampleArgs {
  DataSource source;
  std::string probs;
  std::string model;
  std::size_t p = 100;
  std::uint64_t seed = 1;
  double max_trials_factor = 1e4;
  std::string output;
  std::string stats;
};

struct BenchArgs {
  DataSource source;
  std::string config;
  std::optional<std::size_t> threads;
  std::string out_dir = ".";
  std::string prefix = "report";
  std::string baseline;
};

struct ReportArgs {
  std::string summary;
  std::string out_dir = ".";
  std::string prefix = "report";
  std::string baseline;
};

// Each returns the process exit code. Results go to files or stdout,
// warnings to stderr; errors propagate as exceptions.
int run_ingest(const IngestArgs& args);
int run_inject(const InjectArgs& args);
int run_estimate(const EstimateArgs& args);
int run_sample(const SampleArgs& args);
int run_bench(const BenchArgs& args);
int run_report(const ReportArgs& args);
int run_presets();

}  // namespace entity_sampler::cli
