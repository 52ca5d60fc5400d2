#include "htq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "htq/sim.hpp"

namespace htq {

namespace {

constexpr double kZ = 1.959963984540054;

void require_nonempty(const SamplePool& pool, const char* who) {
  if (pool.empty()) throw StatsError(std::string(who) + ": empty pool");
}

struct Wilson {
  double lo, hi;
};

Wilson wilson(double p, double n) {
  double z2 = kZ * kZ;
  double denom = 1.0 + z2 / n;
  double centre = (p + z2 / (2.0 * n)) / denom;
  double half = kZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

// (value, weight) sorted ascending
std::vector<std::pair<double, double>> sorted_weighted(const SamplePool& pool) {
  std::vector<std::pair<double, double>> out(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) out[i] = {pool.values[i], pool.weight(i)};
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace

CcdfEstimate empirical_ccdf(const SamplePool& pool, double x) {
  require_nonempty(pool, "empirical_ccdf");
  CcdfEstimate e;
  if (!pool.weighted()) {
    std::size_t above = 0;
    for (double v : pool.values) above += v > x;
    e.n_eff = static_cast<double>(pool.size());
    e.p = static_cast<double>(above) / e.n_eff;
  } else {
    double sw = 0.0, sw2 = 0.0, sa = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      double w = pool.weights[i];
      sw += w;
      sw2 += w * w;
      if (pool.values[i] > x) sa += w;
    }
    e.p = sa / sw;
    e.n_eff = sw * sw / sw2;
  }
  auto ci = wilson(e.p, e.n_eff);
  e.ci_low = ci.lo;
  e.ci_high = ci.hi;
  return e;
}

std::vector<TailVerdict> tail_ratio(const SamplePool& pool, const PowerTailAsymptote& asym,
                                    const std::vector<double>& probe_probs) {
  require_nonempty(pool, "tail_ratio");
  double n = static_cast<double>(pool.size());
  std::vector<TailVerdict> out;
  for (double p : probe_probs) {
    if (!(p > 10.0 / n && p < 0.1))
      throw StatsError("tail_ratio: probe " + std::to_string(p) + " outside resolvable range (10/n, 0.1) for n = " +
                       std::to_string(pool.size()));
    TailVerdict v;
    v.probe_p = p;
    v.quantile_x = asym.level_for(p);
    v.asymptote_value = asym.ccdf(v.quantile_x);
    auto e = empirical_ccdf(pool, v.quantile_x);
    v.empirical_ccdf = e.p;
    v.ratio = e.p / v.asymptote_value;
    v.ci_low = std::min(v.ratio, e.ci_low / v.asymptote_value);
    v.ci_high = std::max(v.ratio, e.ci_high / v.asymptote_value);
    out.push_back(v);
  }
  return out;
}

double ks_distance(const SamplePool& pool, const std::function<double(double)>& cdf) {
  require_nonempty(pool, "ks_distance");
  auto s = sorted_weighted(pool);
  double total = 0.0;
  for (const auto& [v, w] : s) total += w;
  double d = 0.0, below = 0.0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    double mass = 0.0;
    while (j < s.size() && s[j].first == s[i].first) mass += s[j++].second;
    double f = cdf(s[i].first);
    d = std::max({d, std::abs(f - below / total), std::abs(f - (below + mass) / total)});
    below += mass;
    i = j;
  }
  return std::min(1.0, d);
}

double ks_distance(const SamplePool& a, const SamplePool& b) {
  require_nonempty(a, "ks_distance");
  require_nonempty(b, "ks_distance");
  auto sa = sorted_weighted(a), sb = sorted_weighted(b);
  double ta = 0.0, tb = 0.0;
  for (const auto& p : sa) ta += p.second;
  for (const auto& p : sb) tb += p.second;
  double fa = 0.0, fb = 0.0, d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() || j < sb.size()) {
    double x = std::min(i < sa.size() ? sa[i].first : INFINITY, j < sb.size() ? sb[j].first : INFINITY);
    while (i < sa.size() && sa[i].first == x) fa += sa[i++].second;
    while (j < sb.size() && sb[j].first == x) fb += sb[j++].second;
    d = std::max(d, std::abs(fa / ta - fb / tb));
  }
  return d;
}

LstEstimate empirical_lst(const SamplePool& pool, double omega) {
  require_nonempty(pool, "empirical_lst");
  if (!(omega >= 0.0)) throw StatsError("empirical_lst: omega must be >= 0");
  double sw = 0.0, sw2 = 0.0, m = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    double w = pool.weight(i);
    double e = std::exp(-omega * pool.values[i]);
    sw += w;
    sw2 += w * w;
    m += w * e;
    m2 += w * e * e;
  }
  LstEstimate out;
  out.value = m / sw;
  double var = std::max(0.0, m2 / sw - out.value * out.value);
  double n_eff = sw * sw / sw2;
  out.se = std::sqrt(var / n_eff);
  out.ci_low = out.value - kZ * out.se;
  out.ci_high = out.value + kZ * out.se;
  return out;
}

HillEstimate hill_estimator(const SamplePool& pool, std::size_t k) {
  require_nonempty(pool, "hill_estimator");
  if (k < 2 || k >= pool.size() / 10)
    throw StatsError("hill_estimator: need 2 <= k < n/10, got k = " + std::to_string(k) +
                     ", n = " + std::to_string(pool.size()));
  std::vector<double> v = pool.values;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end(), std::greater<>());
  double threshold = v[k];
  if (!(threshold > 0.0)) throw StatsError("hill_estimator: threshold order statistic is not positive");
  double h = 0.0;
  for (std::size_t i = 0; i < k; ++i) h += std::log(v[i] / threshold);
  h /= static_cast<double>(k);
  if (!(h > 0.0)) throw StatsError("hill_estimator: degenerate (constant) upper tail");
  HillEstimate e;
  e.k = k;
  e.index = 1.0 / h;
  double rel = kZ / std::sqrt(static_cast<double>(k));
  e.ci_low = e.index * (1.0 - rel);
  e.ci_high = e.index * (1.0 + rel);
  return e;
}

HillPlateau hill_plateau(const SamplePool& pool, std::size_t k_min, std::size_t k_max, std::size_t window,
                         double tol) {
  HillPlateau out;
  for (std::size_t k = k_min; k <= k_max; k *= 2) out.path.push_back(hill_estimator(pool, k));
  for (std::size_t i = 0; i + window <= out.path.size(); ++i) {
    double lo = INFINITY, hi = 0.0, sum = 0.0;
    for (std::size_t j = i; j < i + window; ++j) {
      lo = std::min(lo, out.path[j].index);
      hi = std::max(hi, out.path[j].index);
      sum += out.path[j].index;
    }
    if (hi / lo - 1.0 <= tol) {
      out.found = true;
      out.index = sum / static_cast<double>(window);
      return out;
    }
  }
  return out;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double batch_means_se(const std::vector<double>& b) {
  if (b.size() < 2) return std::numeric_limits<double>::infinity();
  double m = mean(b), ss = 0.0;
  for (double x : b) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(b.size() - 1) / static_cast<double>(b.size()));
}

}  // namespace htq
