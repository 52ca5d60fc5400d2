#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "htq/mlf.hpp"
#include "oracles.hpp"

using namespace htq;

TEST(MlFunction, SpecialValues) {
  for (double a : {0.2, 0.5, 0.9, 1.0}) EXPECT_DOUBLE_EQ(ml_function(a, 0.0), 1.0);
  EXPECT_NEAR(ml_function(1.0, -1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(ml_function(0.5, -1.0), std::exp(1.0) * std::erfc(1.0), 1e-14);
}

TEST(MlFunction, HalfMatchesErfcAcrossRegimes) {
  // E_{1/2}(-z) = exp(z^2) erfc(z), evaluated with the scaled form for large z
  for (double z = 0.05; z < 40.0; z *= 1.17) {
    double ref = z < 20.0 ? std::exp(z * z) * std::erfc(z) : (1.0 / (z * std::sqrt(M_PI))) * (1.0 - 0.5 / (z * z) + 0.75 / std::pow(z, 4) - 1.875 / std::pow(z, 6));
    EXPECT_NEAR(ml_function(0.5, -z), ref, 1e-11 * std::max(1.0, ref)) << z;
  }
}

TEST(MlFunction, MatchesDirectSeriesForSmallArguments) {
  for (double a : {0.3, 0.6, 0.85}) {
    // x = |z|^(1/alpha) <= 5 keeps the alternating sum free of cancellation
    for (double x : {0.1, 0.7, 2.0, 5.0}) {
      double z = -std::pow(x, a);
      EXPECT_NEAR(ml_function(a, z), oracle::ml_series(a, z), 1e-12) << a << " " << z;
    }
  }
}

TEST(MlFunction, ContinuousAtRegimeSwitches) {
  for (double a : {0.3, 0.5, 0.7, 0.95}) {
    for (double x : {MittagLeffler::kDoubleSeriesMax, MittagLeffler::kQuadSeriesMax}) {
      double z = -std::pow(x, a);
      double lo = ml_function(a, z * (1 - 1e-13)), hi = ml_function(a, z * (1 + 1e-13));
      EXPECT_NEAR(lo, hi, 1e-10) << a << " " << x;
    }
  }
}

TEST(MlFunction, CompletelyMonotoneOnNegativeAxis) {
  for (double a : {0.25, 0.5, 0.75, 0.95}) {
    double prev = 1.0;
    for (double x = 0.01; x < 200.0; x *= 1.1) {
      double v = ml_function(a, -std::pow(x, a));
      EXPECT_LE(v, prev) << a << " " << x;
      EXPECT_GT(v, 0.0);
      prev = v;
    }
  }
}

TEST(MlCdf, Values) {
  for (double a : {0.3, 0.5, 1.0}) EXPECT_DOUBLE_EQ(ml_cdf(a, 0.0), 0.0);
  EXPECT_NEAR(ml_cdf(1.0, 1.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(ml_cdf(0.5, 1.0), 1.0 - std::exp(1.0) * std::erfc(1.0), 1e-14);
  for (int i = 0; i < 2000; ++i) {
    double x = 20.0 * i / 1999.0;
    EXPECT_NEAR(ml_cdf(0.5, x), oracle::ml_half_cdf(x), 1e-8) << x;
  }
}

TEST(MlCdf, HeavyTailBehaviour) {
  // 1 - F(x) = x^-alpha / Gamma(1 - alpha) - x^-2alpha / Gamma(1 - 2 alpha) + O(x^-3alpha)
  for (double a : {0.3, 0.5, 0.8}) {
    double x = 1e8;
    double two = std::pow(x, -a) / std::tgamma(1.0 - a) - std::pow(x, -2 * a) / std::tgamma(1.0 - 2 * a);
    EXPECT_NEAR(ml_ccdf(a, x) / two, 1.0, 1e-4) << a;
  }
}

TEST(MlCdf, RejectsBadAlpha) {
  EXPECT_THROW(MittagLeffler(0.0), std::invalid_argument);
  EXPECT_THROW(MittagLeffler(1.2), std::invalid_argument);
}

TEST(MlSample, AlphaOneIsExponential) {
  Stream a(3, 0), b(3, 0);
  MittagLeffler ml(1.0);
  for (int i = 0; i < 100; ++i) EXPECT_DOUBLE_EQ(ml.sample(a), b.exponential());
}

TEST(MlSample, KolmogorovDistance) {
  MittagLeffler ml(0.5);
  Stream s(1, 4);
  const int n = 1000000;
  std::vector<double> v(n);
  for (auto& x : v) x = ml.sample(s);
  std::sort(v.begin(), v.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    double f = oracle::ml_half_cdf(v[i]);
    d = std::max({d, std::abs(f - i / double(n)), std::abs(f - (i + 1) / double(n))});
  }
  EXPECT_LT(d, 0.005);
}

TEST(MlSample, EmpiricalLstAtOne) {
  MittagLeffler ml(0.7);
  Stream s(2, 4);
  std::vector<double> v(1000000);
  for (auto& x : v) x = std::exp(-ml.sample(s));
  EXPECT_LT(std::abs(oracle::mean(v) - 0.5), 3.0 * oracle::se(v));
}
