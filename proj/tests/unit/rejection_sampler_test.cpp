#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "entity_sampler/error.hpp"
#include "entity_sampler/probability_map.hpp"
#include "entity_sampler/rejection_sampler.hpp"
#include "entity_sampler/synthetic.hpp"
#include "temp_dir.hpp"

namespace es = entity_sampler;

namespace {

es::Dataset labelled(const std::vector<std::string>& labels) {
  es::DatasetColumns c;
  c.dim = 1;
  for (std::size_t i = 0; i < labels.size(); ++i) c.features.push_back(static_cast<double>(i));
  c.entity_labels = labels;
  return es::Dataset(std::move(c));
}

}  // namespace

TEST(ExactInducedDistribution, ExactProbabilitiesGiveUniform) {
  const auto data = labelled({"a", "a", "b"});
  const auto map = es::exact_probability_map(data);
  EXPECT_DOUBLE_EQ(map[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(map[2], 1.0 / 3.0);
  const auto d = es::exact_induced_distribution(data, map);
  EXPECT_NEAR(d.mass("a"), 0.5, 1e-15);
  EXPECT_NEAR(d.mass("b"), 0.5, 1e-15);
  EXPECT_LE(es::induced_tv_to_uniform(data, map), 1e-15);
}

TEST(ExactInducedDistribution, HandEnumeratedAcceptance) {
  const auto data = labelled({"a", "a", "a", "b"});
  const es::ProbabilityMap map({0.5, 0.5, 0.5, 0.25}, "test");
  const auto d = es::exact_induced_distribution(data, map);
  EXPECT_NEAR(d.mass("a"), 0.6, 1e-15);
  EXPECT_NEAR(d.mass("b"), 0.4, 1e-15);
}

TEST(ExactInducedDistribution, InvariantToScaling) {
  const auto data = labelled({"a", "b", "b", "c", "c", "c"});
  const std::vector<double> p{0.3, 0.2, 0.25, 0.1, 0.4, 0.35};
  for (double c : {0.5, 1.0 / 3.0, 2.0, 1e-6}) {
    std::vector<double> scaled(p);
    for (auto& v : scaled) v *= c;
    const auto a = es::induced_entity_masses(data, es::ProbabilityMap(p, "p"));
    const auto b = es::induced_entity_masses(data, es::ProbabilityMap(scaled, "p"));
    for (std::size_t e = 0; e < a.size(); ++e) EXPECT_NEAR(a[e], b[e], 1e-15);
  }
}

TEST(ExpectedTrials, ClosedForms) {
  const auto distinct = labelled({"a", "b", "c"});
  EXPECT_DOUBLE_EQ(es::expected_trials_per_accept(distinct, es::exact_probability_map(distinct)), 1.0);
  const auto dup = labelled({"a", "a", "b"});
  EXPECT_NEAR(es::expected_trials_per_accept(dup, es::exact_probability_map(dup)), 1.5, 1e-15);
}

TEST(SampleClean, DistinctRecordsAcceptEveryDraw) {
  const auto data = labelled({"a", "b", "c", "d"});
  const auto res = es::sample_clean(data, es::exact_probability_map(data), 1000, 3);
  EXPECT_EQ(res.accepted.size(), 1000u);
  EXPECT_EQ(res.trials, 1000u);
  EXPECT_DOUBLE_EQ(res.acceptance_rate(), 1.0);
}

TEST(SampleClean, EmpiricalMatchesInducedDistribution) {
  // 20 records over 8 entities with a deliberately inexact map.
  std::mt19937_64 rng(11);
  std::vector<std::string> labels;
  std::vector<double> p;
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int i = 0; i < 20; ++i) {
    labels.push_back("e" + std::to_string(i % 8 == 7 ? 0 : i % 8));
    p.push_back(u(rng));
  }
  const auto data = labelled(labels);
  const es::ProbabilityMap map(p, "random");
  const auto masses = es::induced_entity_masses(data, map);
  const std::size_t draws = 1000000;
  const auto res = es::sample_clean(data, map, draws, 5);
  for (std::size_t e = 0; e < masses.size(); ++e) {
    const double sd = std::sqrt(masses[e] * (1 - masses[e]) / static_cast<double>(draws));
    const double emp = static_cast<double>(res.per_entity_counts[e]) / static_cast<double>(draws);
    EXPECT_LE(std::abs(emp - masses[e]), 4.0 * sd) << "entity " << e;
  }
}

TEST(SampleClean, MeanTrialsMatchClosedForm) {
  // eta1/eta2 = 10: one entity with 10 copies, nine singletons.
  std::vector<std::size_t> freq{10, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  const auto data = es::synthetic::with_frequencies(freq, 1);
  const auto map = es::exact_probability_map(data);
  const double expected = es::expected_trials_per_accept(data, map);
  const auto res = es::sample_clean(data, map, 10000, 9);
  EXPECT_NEAR(res.trials_per_accept(), expected, 0.1 * expected);
}

TEST(SampleClean, Errors) {
  const auto data = labelled({"a", "b"});
  EXPECT_THROW(es::sample_clean(data, es::ProbabilityMap({0.5}, "short"), 1, 1), es::CoverageError);
  EXPECT_THROW(es::sample_clean(data, es::exact_probability_map(data), 0, 1), es::ConfigError);
  EXPECT_THROW(es::ProbabilityMap({0.5, 0.0}, "zero"), es::CoverageError);
  EXPECT_THROW(es::ProbabilityMap({0.5, 1.5}, "big"), es::CoverageError);
  const es::ProbabilityMap skewed({1.0, 1e-6}, "skewed");
  es::SamplerOptions opts;
  opts.max_trials_factor = 1.0;
  EXPECT_THROW(es::sample_clean(data, skewed, 100, 1, opts), es::ConvergenceError);
}

TEST(SampleClean, DeterministicForSeed) {
  const auto data = labelled({"a", "a", "b", "c", "c", "c"});
  const auto map = es::exact_probability_map(data);
  EXPECT_EQ(es::sample_clean(data, map, 50, 42).accepted, es::sample_clean(data, map, 50, 42).accepted);
}

TEST(ProbabilityCsv, RoundTripAndCoverage) {
  const auto data = labelled({"a", "a", "b"});
  const auto map = es::exact_probability_map(data);
  TempDir dir;
  const auto p = dir.path() / "phat.csv";
  es::write_probability_csv(p, data, map);
  const auto back = es::read_probability_csv(p, data);
  EXPECT_EQ(back.source(), "exact");
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back[i], map[i]);
  EXPECT_TRUE(back.has_clusters());

  const auto partial = dir.file("partial.csv", "record_id,phat\n0,0.5\n1,0.5\n");
  EXPECT_THROW(es::read_probability_csv(partial, data), es::CoverageError);
  const auto stranger = dir.file("stranger.csv", "record_id,phat\n0,0.5\n1,0.5\n2,1\nzz,1\n");
  EXPECT_THROW(es::read_probability_csv(stranger, data), es::CoverageError);
}
