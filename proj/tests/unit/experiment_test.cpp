#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "entity_sampler/error.hpp"
#include "entity_sampler/experiment.hpp"
#include "entity_sampler/report.hpp"
#include "entity_sampler/synthetic.hpp"
#include "temp_dir.hpp"

namespace es = entity_sampler;

namespace {

std::string cells_csv(const es::SampleReport& r) {
  std::ostringstream out;
  es::write_cells_csv(out, r);
  return out.str();
}

es::ExperimentSpec small_spec() {
  es::ExperimentSpec s;
  s.fractions = {0.05, 0.1};
  s.dup_rates = {0.0, 0.2};
  s.repeats = 6;
  s.seed = 3;
  return s;
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(InjectDuplicates, ZeroRateLeavesDataUnchanged) {
  const auto data = es::synthetic::table(100, 1);
  const auto out = es::inject_duplicates(data, 0.0, {}, 5);
  ASSERT_EQ(out.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(out.id(i), data.id(i));
    EXPECT_EQ(out.value(i), data.value(i));
  }
  EXPECT_THROW(es::inject_duplicates(data, 1.0, {}, 5), es::ConfigError);
}

TEST(InjectDuplicates, AddedCountMatchesTheProfileExpectation) {
  const std::size_t n = 2000;
  const double rate = 0.2;
  const auto data = es::synthetic::table(n, 2);
  // Per record: E[added] = rate·1.25, E[added²] = rate·1.85.
  const double mean = n * rate * 1.25;
  const double var = n * (rate * 1.85 - rate * rate * 1.25 * 1.25);
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    total += static_cast<double>(es::inject_duplicates(data, rate, {}, seed).size() - n);
  EXPECT_NEAR(total / 100.0, mean, 3.0 * std::sqrt(var / 100.0));
}

TEST(InjectDuplicates, EntityMeanIsPreserved) {
  const auto data = es::synthetic::table(300, 4);
  for (auto kind : {es::DupKind::kTpch, es::DupKind::kUniform, es::DupKind::kArbitrary}) {
    es::DupProfile p;
    p.kind = kind;
    const auto out = es::inject_duplicates(data, 0.5, p, 9);
    EXPECT_GT(out.size(), data.size());
    EXPECT_EQ(out.entity_count(), data.size());
    EXPECT_DOUBLE_EQ(es::entity_mean_value(out), es::entity_mean_value(data));
  }
}

TEST(DupProfile, Probabilities) {
  EXPECT_EQ(es::DupProfile{}.copy_probs(1), (std::vector<double>{0.8, 0.15, 0.05}));
  es::DupProfile u{es::DupKind::kUniform, 4};
  EXPECT_EQ(u.copy_probs(1), std::vector<double>(4, 0.25));
  es::DupProfile a{es::DupKind::kArbitrary, 3};
  const auto p = a.copy_probs(7);
  EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
  EXPECT_EQ(p, a.copy_probs(7));
  EXPECT_EQ(es::parse_dup_kind("tpch"), es::DupKind::kTpch);
  EXPECT_THROW(es::parse_dup_kind("zipf"), es::ConfigError);
}

TEST(ExperimentSpec, JsonRoundTripAndValidation) {
  auto s = small_spec();
  s.method = es::Method::kLsh;
  s.k_max = 5;
  const auto back = es::parse_experiment_json(es::experiment_to_json(s));
  EXPECT_EQ(back.method, es::Method::kLsh);
  EXPECT_EQ(back.fractions, s.fractions);
  EXPECT_EQ(back.dup_rates, s.dup_rates);
  EXPECT_EQ(back.k_max, 5u);
  EXPECT_EQ(back.repeats, 6u);
  s.fractions = {0.0};
  EXPECT_THROW(s.validate(), es::ConfigError);
  EXPECT_THROW(es::parse_experiment_json("{\"method\": \"magic\"}"), es::ConfigError);
}

TEST(RunExperiment, DeterministicAcrossThreadCounts) {
  const auto data = es::synthetic::table(400, 5);
  auto spec = small_spec();
  const auto a = cells_csv(es::run_experiment(data, spec));
  const auto b = cells_csv(es::run_experiment(data, spec));
  spec.threads = 2;
  const auto c = cells_csv(es::run_experiment(data, spec));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(RunExperiment, ZeroDuplicatesMatchUniformSubsampleBaseline) {
  const std::size_t n = 1000;
  const auto data = es::synthetic::table(n, 6);
  es::ExperimentSpec spec;
  spec.fractions = {0.05};
  spec.dup_rates = {0.0};
  spec.repeats = 100;
  const auto report = es::run_experiment(data, spec);
  const auto& cell = report.cell(0, 0);
  ASSERT_EQ(cell.ok_repeats, 100u);

  // Independent baseline: relative error of the mean of a uniform sample
  // with replacement of the same size.
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> errs;
  for (int r = 0; r < 100; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < cell.m; ++i) s += data.value(pick(rng));
    errs.push_back(std::abs(s / static_cast<double>(cell.m) - report.clean_mean) / report.clean_mean);
  }
  double mean = 0.0, ss = 0.0;
  for (double e : errs) mean += e / 100.0;
  for (double e : errs) ss += (e - mean) * (e - mean);
  const double se = std::sqrt(ss / 99.0) / 10.0;
  EXPECT_NEAR(cell.mean_error, mean, 2.0 * std::hypot(se, cell.stderr_error));
}

TEST(RunExperiment, MethodMismatchIsCountedPerCell) {
  const auto data = es::synthetic::text_corpus(50, std::vector<double>{1.0}, 4, 0, 1);
  auto spec = small_spec();
  spec.method = es::Method::kGmm;
  const auto report = es::run_experiment(data, spec);
  EXPECT_EQ(report.total_failures(), 2u * 2u * 6u);
  for (const auto& c : report.cells) {
    EXPECT_EQ(c.ok_repeats, 0u);
    EXPECT_FALSE(c.errors.empty());
  }
}

TEST(Report, EmptySweepGivesHeaderOnly) {
  const auto data = es::synthetic::table(10, 1);
  es::ExperimentSpec spec;
  spec.repeats = 1;
  const auto report = es::run_experiment(data, spec);
  EXPECT_EQ(count_lines(cells_csv(report)), 1u);
}

TEST(Report, GridHasOneRowPerDupRate) {
  const auto data = es::synthetic::table(500, 2);
  es::ExperimentSpec spec;
  spec.fractions = {0.01, 0.02, 0.04, 0.06, 0.08, 0.1};
  spec.dup_rates = {0.0, 0.1, 0.2, 0.3, 0.4};
  spec.repeats = 2;
  const auto report = es::run_experiment(data, spec);
  std::ostringstream grid;
  es::write_grid_csv(grid, report);
  std::istringstream in(grid.str());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
    ++rows;
  }
  EXPECT_EQ(rows, 6u);  // header + 5 dup rates
}

TEST(Report, FigureCarriesAccuracyAndBaseline) {
  const auto data = es::synthetic::table(300, 2);
  auto spec = small_spec();
  const auto report = es::run_experiment(data, spec);
  TempDir dir;
  const auto base = dir.file("base.csv", "fraction,accuracy\n0.05,0.9\n0.1,0.95\n");
  std::ostringstream fig;
  es::write_figure_csv(fig, report, base);
  std::istringstream in(fig.str());
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header, "dup_rate,fraction,error,accuracy,bound,baseline_accuracy");
  std::getline(in, row);
  double dup, frac, err, acc;
  char c;
  std::istringstream r(row);
  r >> dup >> c >> frac >> c >> err >> c >> acc;
  EXPECT_NEAR(acc, 1.0 - err, 1e-9);
  EXPECT_NE(row.find("0.9"), std::string::npos);

  const auto files = es::emit_report(report, dir.path(), {"t", std::nullopt});
  EXPECT_EQ(files.size(), 4u);
  for (const auto& f : files) EXPECT_TRUE(std::filesystem::exists(f));
}

TEST(Report, SummaryJsonRoundTrips) {
  const auto data = es::synthetic::table(200, 8);
  const auto report = es::run_experiment(data, small_spec());
  const auto back = es::report_from_json(es::summary_json(report));
  EXPECT_EQ(cells_csv(back), cells_csv(report));
  EXPECT_THROW(es::report_from_json("{}"), es::ConfigError);
}
