#include <gtest/gtest.h>

#include <cmath>

#include "htq/dist.hpp"
#include "oracles.hpp"

using namespace htq;

namespace {
const double kSqrtPi = std::sqrt(M_PI);
}

TEST(Ccdf, ParetoAndExponentialValues) {
  auto p = HeavyTailRV::pareto(1.0, 1.5);
  EXPECT_DOUBLE_EQ(p.ccdf(4.0), 0.125);
  EXPECT_DOUBLE_EQ(p.ccdf(0.5), 1.0);
  EXPECT_NEAR(HeavyTailRV::exponential(1.0).ccdf(1.0), std::exp(-1.0), 1e-15);
  EXPECT_DOUBLE_EQ(HeavyTailRV::deterministic(2.0).ccdf(1.999), 1.0);
  EXPECT_DOUBLE_EQ(HeavyTailRV::deterministic(2.0).ccdf(2.0), 0.0);
}

TEST(Ccdf, MixtureIsWeightedSum) {
  auto a = HeavyTailRV::pareto(1.0, 1.5);
  auto b = HeavyTailRV::exponential(2.0);
  auto m = HeavyTailRV::mixture({0.3, 0.7}, {a, b});
  for (double x : {0.1, 1.0, 3.0, 50.0}) EXPECT_NEAR(m.ccdf(x), 0.3 * a.ccdf(x) + 0.7 * b.ccdf(x), 1e-15);
  EXPECT_NEAR(m.mean(), 0.3 * 3.0 + 0.7 * 0.5, 1e-14);
  EXPECT_THROW(HeavyTailRV::mixture({0.3, 0.3}, {a, b}), std::invalid_argument);
}

TEST(Ccdf, RejectsInvalidParameters) {
  EXPECT_THROW(HeavyTailRV::pareto(1.0, 0.9), std::invalid_argument);
  EXPECT_THROW(HeavyTailRV::pareto(-1.0, 1.5), std::invalid_argument);
  EXPECT_THROW(HeavyTailRV::exponential(0.0), std::invalid_argument);
}

TEST(Moments, ParetoMeanAndInfiniteSecondMoment) {
  auto p = HeavyTailRV::pareto(1.0, 1.5);
  EXPECT_DOUBLE_EQ(p.mean(), 3.0);
  EXPECT_TRUE(std::isinf(p.second_moment()));
  EXPECT_NEAR(HeavyTailRV::pareto(1.0, 3.0).second_moment(), 3.0, 1e-14);
  EXPECT_NEAR(HeavyTailRV::exponential(2.0).second_moment(), 0.5, 1e-15);
}

TEST(TailConstant, ParetoValuesAndHomogeneity) {
  auto c1 = tail_constant(HeavyTailRV::pareto(1.0, 1.5));
  EXPECT_NEAR(c1.C, 2.0 * kSqrtPi, 1e-13);
  EXPECT_DOUBLE_EQ(c1.nu, 1.5);
  EXPECT_NEAR(tail_constant(HeavyTailRV::pareto(2.0, 1.5)).C, 2.0 * kSqrtPi * std::pow(2.0, 1.5), 1e-12);
  // oracle: Gamma(1 - nu) from the reflection formula
  for (double nu : {1.1, 1.3, 1.7, 2.5}) {
    double g = M_PI / (std::sin(M_PI * (1.0 - nu)) * std::tgamma(nu));
    EXPECT_NEAR(tail_constant(HeavyTailRV::pareto(1.0, nu)).C, -g, 1e-10 * std::abs(g));
  }
}

TEST(TailConstant, LightTailAndIntegerIndexRejected) {
  EXPECT_THROW(tail_constant(HeavyTailRV::exponential(1.0)), std::invalid_argument);
  EXPECT_THROW(tail_constant(HeavyTailRV::pareto(1.0, 2.0)), std::invalid_argument);
}

TEST(TailConstant, MixtureKeepsHeaviestComponent) {
  auto m = HeavyTailRV::mixture({0.25, 0.5, 0.25}, {HeavyTailRV::pareto(1.0, 1.5), HeavyTailRV::exponential(1.0),
                                                    HeavyTailRV::pareto(2.0, 1.8)});
  auto tc = tail_constant(m);
  EXPECT_DOUBLE_EQ(tc.nu, 1.5);
  EXPECT_NEAR(tc.C, 0.25 * 2.0 * kSqrtPi, 1e-13);
}

TEST(Residual, ParetoCcdfMatchesIntegratedTail) {
  auto p = HeavyTailRV::pareto(1.0, 1.5);
  auto r = residual(p);
  EXPECT_NEAR(r.ccdf(1.0), 2.0 / 3.0, 1e-14);
  for (double x : {0.3, 1.0, 2.0, 10.0}) {
    double lower = x < 1.0 ? oracle::simpson([&](double y) { return p.ccdf(y); }, x, 1.0) : 0.0;
    double oracle_v = (lower + oracle::simpson_to_inf([&](double y) { return p.ccdf(y); }, std::max(x, 1.0))) / 3.0;
    EXPECT_NEAR(r.ccdf(x), oracle_v, 1e-7) << x;
  }
}

TEST(Residual, ExponentialIsMemoryless) {
  auto r = residual(HeavyTailRV::exponential(2.5));
  for (double x : {0.0, 0.2, 1.0, 4.0}) EXPECT_NEAR(r.ccdf(x), std::exp(-2.5 * x), 1e-15);
}

TEST(Residual, DeterministicIsUniform) {
  auto r = residual(HeavyTailRV::deterministic(4.0));
  for (double x : {0.0, 1.0, 3.0}) EXPECT_NEAR(r.ccdf(x), 1.0 - x / 4.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.ccdf(5.0), 0.0);
  EXPECT_NEAR(r.mean(), 2.0, 1e-15);
}

TEST(Sampling, ParetoInverseTransform) {
  EXPECT_NEAR(HeavyTailRV::pareto(1.0, 1.5).from_uniform(0.25), std::pow(0.25, -1.0 / 1.5), 1e-14);
}

TEST(Sampling, MeansWithinFiveStandardErrors) {
  for (const auto& rv : {HeavyTailRV::exponential(0.7), HeavyTailRV::pareto(1.0, 3.5), HeavyTailRV::deterministic(1.2),
                         HeavyTailRV::mixture({0.4, 0.6}, {HeavyTailRV::exponential(1.0), HeavyTailRV::pareto(0.5, 4.0)})}) {
    Stream s(11, 3);
    std::vector<double> v(1000000);
    for (auto& x : v) x = rv.sample(s);
    double se = std::max(oracle::se(v), 1e-10 * rv.mean());
    EXPECT_LT(std::abs(oracle::mean(v) - rv.mean()), 5.0 * se) << rv.describe();
  }
}

TEST(Sampling, ResidualParetoCcdfAtScale) {
  auto r = residual(HeavyTailRV::pareto(1.0, 1.5));
  Stream s(5, 0);
  const int n = 1000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += r.sample(s) > 1.0;
  double p = 2.0 / 3.0;
  EXPECT_LT(std::abs(hits / double(n) - p), 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Lst, ExponentialAndNormalization) {
  EXPECT_NEAR(lst_numeric(HeavyTailRV::exponential(1.0), 1.0), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(lst_numeric(HeavyTailRV::pareto(1.0, 1.5), 0.0), 1.0);
  EXPECT_NEAR(lst_numeric(HeavyTailRV::pareto(1.0, 1.5), 1e-12), 1.0, 1e-5);
  EXPECT_NEAR(lst_numeric(HeavyTailRV::deterministic(2.0), 0.5), std::exp(-1.0), 1e-12);
}

TEST(Lst, ParetoMatchesDirectIntegral) {
  auto p = HeavyTailRV::pareto(1.0, 1.5);
  for (double w : {0.1, 1.0, 5.0}) {
    double direct = oracle::simpson_to_inf([&](double x) { return std::exp(-w * x) * 1.5 * std::pow(x, -2.5); }, 1.0);
    EXPECT_NEAR(lst_numeric(p, w), direct, 1e-8) << w;
  }
}

TEST(Lst, ResidualParetoSmallOmegaExpansion) {
  auto p = HeavyTailRV::pareto(1.0, 1.5);
  double beta = p.mean(), C = tail_constant(p).C;
  double prev = INFINITY;
  for (double w : {1e-2, 1e-3, 1e-4, 1e-5}) {
    double ratio = (1.0 - lst_numeric(residual(p), w)) * beta / (C * std::sqrt(w));
    double gap = std::abs(ratio - 1.0);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(Lst, LaplaceTransformIsDecreasingInOmega) {
  auto r = residual(HeavyTailRV::pareto(1.0, 1.3));
  double prev = 1.0;
  for (double w = 1e-4; w < 100.0; w *= 3.0) {
    double v = lst_numeric(r, w);
    EXPECT_LT(v, prev);
    EXPECT_GT(v, 0.0);
    prev = v;
  }
}

TEST(Kv, DistributionRoundTrip) {
  for (const auto& rv : {HeavyTailRV::pareto(0.3, 1.7), HeavyTailRV::exponential(2.0), HeavyTailRV::deterministic(1.5),
                         HeavyTailRV::mixture({0.5, 0.5}, {HeavyTailRV::pareto(1.0, 1.5), HeavyTailRV::exponential(1.0)})}) {
    auto back = HeavyTailRV::from_kv(rv.to_kv());
    EXPECT_EQ(back.describe(), rv.describe());
    for (double x : {0.1, 1.0, 10.0}) EXPECT_DOUBLE_EQ(back.ccdf(x), rv.ccdf(x));
  }
}

TEST(Stable, HalfStableMatchesLevyLaw) {
  Stream s(7, 1);
  const int n = 200000;
  std::vector<double> v(n);
  for (auto& x : v) x = sample_positive_stable(0.5, s);
  std::sort(v.begin(), v.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    double f = oracle::levy_half_cdf(v[i]);
    d = std::max({d, std::abs(f - i / double(n)), std::abs(f - (i + 1) / double(n))});
  }
  EXPECT_LT(d, 1.63 / std::sqrt(n));
}

TEST(Stable, EmpiricalLaplaceTransform) {
  for (auto [alpha, w] : {std::pair{0.5, 1.0}, std::pair{0.9, 0.5}, std::pair{0.3, 2.0}}) {
    Stream s(9, 2);
    std::vector<double> v(1000000);
    for (auto& x : v) {
      double y = sample_positive_stable(alpha, s);
      ASSERT_GT(y, 0.0);
      x = std::exp(-w * y);
    }
    EXPECT_LT(std::abs(oracle::mean(v) - std::exp(-std::pow(w, alpha))), 3.0 * oracle::se(v)) << alpha;
  }
}
