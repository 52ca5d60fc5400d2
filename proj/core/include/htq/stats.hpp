#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "htq/asymptotics.hpp"

namespace htq {

struct SamplePool;

class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CcdfEstimate {
  double p = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double n_eff = 0.0;
};

// weighted P(V > x) with a Wilson 95% interval on the effective sample size
CcdfEstimate empirical_ccdf(const SamplePool& pool, double x);

struct TailVerdict {
  double probe_p = 0.0;
  double quantile_x = 0.0;
  double empirical_ccdf = 0.0;
  double asymptote_value = 0.0;
  double ratio = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

std::vector<TailVerdict> tail_ratio(const SamplePool& pool, const PowerTailAsymptote& asym,
                                    const std::vector<double>& probe_probs);

// sup |F_n - F| for a continuous reference cdf
double ks_distance(const SamplePool& pool, const std::function<double(double)>& cdf);
double ks_distance(const SamplePool& a, const SamplePool& b);

struct LstEstimate {
  double value = 1.0;
  double se = 0.0;
  double ci_low = 1.0;
  double ci_high = 1.0;
};

LstEstimate empirical_lst(const SamplePool& pool, double omega);

struct HillEstimate {
  double index = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t k = 0;
};

HillEstimate hill_estimator(const SamplePool& pool, std::size_t k);

struct HillPlateau {
  bool found = false;
  double index = 0.0;
  std::vector<HillEstimate> path;
};

// Hill estimates along k = k_min 2^j; a plateau is `window` consecutive
// estimates within a relative spread of `tol`.
HillPlateau hill_plateau(const SamplePool& pool, std::size_t k_min, std::size_t k_max, std::size_t window = 4,
                         double tol = 0.1);

double mean(const std::vector<double>& v);
// standard error of the grand mean from batch means
double batch_means_se(const std::vector<double>& batch_means);

}  // namespace htq
