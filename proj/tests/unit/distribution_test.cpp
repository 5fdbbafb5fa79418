#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "entity_sampler/distribution.hpp"
#include "entity_sampler/error.hpp"

namespace es = entity_sampler;
using Dist = es::DiscreteDistribution;

namespace {

Dist random_dist(std::mt19937_64& rng, std::size_t support) {
  std::vector<std::string> labels;
  std::vector<double> w;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < support; ++i) {
    labels.push_back("s" + std::to_string(i));
    w.push_back(u(rng) < 0.2 ? 0.0 : u(rng));
  }
  w[0] += 1e-3;
  return Dist::from_weights(labels, w);
}

}  // namespace

TEST(TvDistance, Examples) {
  const Dist p({{"a", 0.5}, {"b", 0.5}});
  const Dist q({{"a", 0.8}, {"b", 0.2}});
  EXPECT_DOUBLE_EQ(es::tv_distance(p, p), 0.0);
  EXPECT_NEAR(es::tv_distance(p, q), 0.3, 1e-15);
  const Dist r({{"c", 1.0}});
  EXPECT_DOUBLE_EQ(es::tv_distance(p, r), 1.0);
}

TEST(TvDistance, IsAMetric) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_dist(rng, 12), q = random_dist(rng, 12), r = random_dist(rng, 12);
    EXPECT_DOUBLE_EQ(es::tv_distance(p, q), es::tv_distance(q, p));
    EXPECT_EQ(es::tv_distance(p, p), 0.0);
    EXPECT_LE(es::tv_distance(p, r), es::tv_distance(p, q) + es::tv_distance(q, r) + 1e-15);
    EXPECT_GE(es::tv_distance(p, q), 0.0);
    EXPECT_LE(es::tv_distance(p, q), 1.0);
  }
}

TEST(TvDistance, DenseMatchesLabelled) {
  const std::vector<double> p{0.5, 0.5}, q{0.8, 0.2};
  EXPECT_NEAR(es::tv_distance(p, q), 0.3, 1e-15);
  EXPECT_NEAR(es::tv_to_uniform(q), 0.3, 1e-15);
}

TEST(DiscreteDistribution, RejectsBadMasses) {
  EXPECT_THROW(Dist({{"a", 0.5}, {"b", 0.4}}), es::ConfigError);
  EXPECT_THROW(Dist({{"a", 1.5}, {"b", -0.5}}), es::ConfigError);
  EXPECT_THROW(Dist({{"a", 0.5}, {"a", 0.5}}), es::ConfigError);
  EXPECT_NO_THROW(Dist({{"a", 0.5}, {"b", 0.5 + 1e-10}}));
}

TEST(RelativeError, Examples) {
  EXPECT_EQ(es::relative_error(10, 10), 0.0);
  EXPECT_NEAR(es::relative_error(10, 9), 0.1, 1e-15);
  EXPECT_NEAR(es::relative_error(100, 100.212), 0.00212, 1e-12);
  EXPECT_NEAR(es::relative_error(-4, -2), 0.5, 1e-15);
  EXPECT_THROW(es::relative_error(0, 1), es::DomainError);
}

TEST(EmpiricalDistribution, Examples) {
  const std::vector<std::string> s{"a", "a", "b", "b"};
  const auto d = es::empirical_distribution(s);
  EXPECT_DOUBLE_EQ(d.mass("a"), 0.5);
  EXPECT_DOUBLE_EQ(d.mass("b"), 0.5);
  const std::vector<std::string> one{"a"};
  EXPECT_DOUBLE_EQ(es::empirical_distribution(one).mass("a"), 1.0);
  EXPECT_THROW(es::empirical_distribution(std::vector<std::string>{}), es::DomainError);
}

TEST(EmpiricalDistribution, FairCoinWithinBinomialInterval) {
  std::mt19937_64 rng(2024);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::string> s(100000);
  for (auto& x : s) x = coin(rng) ? "H" : "T";
  const auto d = es::empirical_distribution(s);
  // sd of the heads share is 0.5/sqrt(1e5) ~ 0.00158; 0.01 is > 6 sd.
  EXPECT_NEAR(d.mass("H"), 0.5, 0.01);
  EXPECT_NEAR(d.mass("T"), 0.5, 0.01);
}

TEST(EmpiricalDistribution, ConvergesInTv) {
  std::mt19937_64 rng(99);
  const std::size_t n = 100000;
  int good = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = random_dist(rng, 100);
    std::vector<double> w;
    std::vector<std::string> labels;
    for (const auto& [l, m] : q.entries()) {
      labels.push_back(l);
      w.push_back(m);
    }
    std::discrete_distribution<std::size_t> draw(w.begin(), w.end());
    std::vector<std::string> s(n);
    for (auto& x : s) x = labels[draw(rng)];
    const double bound = 3.0 * std::sqrt(100.0 / static_cast<double>(n));
    good += es::tv_distance(es::empirical_distribution(s), q) <= bound;
  }
  EXPECT_GE(good, 19);
}
