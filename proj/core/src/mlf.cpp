#include "htq/mlf.hpp"

#include <cmath>
#include <mutex>
#include <map>
#include <vector>

#include <quadmath.h>

#include "htq/dist.hpp"

namespace htq {

struct MittagLeffler::Tables {
  std::vector<double> inv_gamma;         // 1 / Gamma(1 + alpha k)
  std::vector<__float128> inv_gamma_q;   // same, quad precision
};

MittagLeffler::MittagLeffler(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("Mittag-Leffler: alpha must be in (0,1]");
  if (alpha == 1.0) return;
  auto t = std::make_shared<Tables>();
  // terms of the series at x = kQuadSeriesMax are below 1e-30 once alpha k > 140
  std::size_t kmax = static_cast<std::size_t>(std::ceil(140.0 / alpha)) + 2;
  t->inv_gamma.resize(kmax);
  t->inv_gamma_q.resize(kmax);
  __float128 a = alpha;
  for (std::size_t k = 0; k < kmax; ++k) {
    __float128 g = 1 + a * static_cast<__float128>(k);
    __float128 inv = expq(-lgammaq(g));
    t->inv_gamma_q[k] = inv;
    t->inv_gamma[k] = static_cast<double>(inv);
  }
  tables_ = std::move(t);
}

double MittagLeffler::series_double(double t) const {
  const auto& c = tables_->inv_gamma;
  double sum = 0.0, p = 1.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    double term = p * c[k];
    sum += term;
    if (alpha_ * k > 20.0 && std::abs(term) < 1e-18) break;
    p *= -t;
  }
  return sum;
}

double MittagLeffler::series_quad(double t) const {
  const auto& c = tables_->inv_gamma_q;
  __float128 sum = 0, p = 1, mt = -static_cast<__float128>(t);
  for (std::size_t k = 0; k < c.size(); ++k) {
    __float128 term = p * c[k];
    sum += term;
    if (alpha_ * k > 60.0 && fabsq(term) < 1e-32Q) break;
    p *= mt;
  }
  return static_cast<double>(sum);
}

double MittagLeffler::asymptotic(double t, double x) const {
  // E_a(-t) = sum_{k>=1} (-1)^{k+1} t^{-k} / Gamma(1 - a k), with
  // 1 / Gamma(1 - y) = Gamma(y) sin(pi y) / pi
  double sum = 0.0, bound = 0.0, prev_env = INFINITY;
  double logt = std::log(t);
  for (int k = 1; k < 100000; ++k) {
    double y = alpha_ * k;
    double log_env = std::lgamma(y) - k * logt;
    double env = std::exp(log_env) / M_PI;
    if (env > prev_env) break;
    double s = std::sin(M_PI * y);
    // sin(pi y) vanishes exactly at integer y
    if (std::abs(y - std::round(y)) < 1e-14) s = 0.0;
    double term = (k % 2 ? 1.0 : -1.0) * env * s;
    sum += term;
    bound = env;
    prev_env = env;
    if (env < 1e-17 * std::max(std::abs(sum), 1e-300)) break;
  }
  if (bound > 1e-10 * std::max(1.0, std::abs(sum)) && bound > 1e-10)
    throw MlfError("Mittag-Leffler asymptotic expansion cannot reach tolerance at x = " + std::to_string(x));
  return sum;
}

double MittagLeffler::function(double z) const {
  if (z > 0.0) throw std::invalid_argument("ml_function: z must be <= 0");
  if (std::isinf(z)) return 0.0;
  double t = -z;
  if (alpha_ == 1.0) return std::exp(z);
  if (t == 0.0) return 1.0;
  double x = std::pow(t, 1.0 / alpha_);
  if (x < kDoubleSeriesMax) return series_double(t);
  if (x < kQuadSeriesMax) return series_quad(t);
  return asymptotic(t, x);
}

double MittagLeffler::ccdf(double x) const {
  if (x <= 0.0) return 1.0;
  if (alpha_ == 1.0) return std::exp(-x);
  double v = function(-std::pow(x, alpha_));
  return std::min(1.0, std::max(0.0, v));
}

double MittagLeffler::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (alpha_ == 1.0) return -std::expm1(-x);
  return 1.0 - ccdf(x);
}

double MittagLeffler::sample(Stream& s) const {
  double e = s.exponential();
  if (alpha_ == 1.0) return e;
  return std::pow(e, 1.0 / alpha_) * sample_positive_stable(alpha_, s);
}

namespace {

const MittagLeffler& cached(double alpha) {
  static std::mutex mu;
  static std::map<double, std::unique_ptr<MittagLeffler>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto& slot = cache[alpha];
  if (!slot) slot = std::make_unique<MittagLeffler>(alpha);
  return *slot;
}

}  // namespace

double ml_function(double alpha, double z) { return cached(alpha).function(z); }
double ml_cdf(double alpha, double x) { return cached(alpha).cdf(x); }
double ml_ccdf(double alpha, double x) { return cached(alpha).ccdf(x); }
double ml_sample(double alpha, Stream& s) { return cached(alpha).sample(s); }

}  // namespace htq
