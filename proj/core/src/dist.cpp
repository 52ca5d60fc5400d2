#include "htq/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace htq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

std::vector<double> cumulative(const std::vector<double>& w) {
  std::vector<double> c(w.size());
  std::partial_sum(w.begin(), w.end(), c.begin());
  for (auto& v : c) v /= c.back();
  c.back() = 1.0;
  return c;
}

std::size_t pick(const std::vector<double>& cumw, double u) {
  auto it = std::lower_bound(cumw.begin(), cumw.end(), u);
  return std::min<std::size_t>(it - cumw.begin(), cumw.size() - 1);
}

void collect_scales(const HeavyTailRV& rv, std::vector<double>& out) {
  switch (rv.family()) {
    case Family::Pareto: out.push_back(rv.x_m()); break;
    case Family::Exponential: out.push_back(1.0 / rv.rate()); break;
    case Family::Deterministic: out.push_back(rv.value()); break;
    case Family::Mixture:
      for (const auto& c : rv.components()) collect_scales(c, out);
      break;
  }
}

// 1 - int_0^inf e^{-t} ccdf(t / omega) dt
template <class Ccdf>
double lst_by_parts(Ccdf ccdf, std::vector<double> scales, double omega, const LstOptions& opt) {
  if (!(omega > 0.0)) {
    if (omega == 0.0) return 1.0;
    throw std::invalid_argument("lst_numeric: omega must be >= 0");
  }
  std::vector<double> pts{0.0};
  double lo = 1.0;
  for (double s : scales) {
    double t = omega * s;
    if (t > 0.0 && t < 60.0) pts.push_back(t);
    lo = std::min(lo, t);
  }
  for (double t = std::max(lo, 1e-14); t < 1.0; t *= 2.0) pts.push_back(t);
  for (double t = 1.0; t <= 64.0; t *= 2.0) pts.push_back(t);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto f = [&](double t) { return std::exp(-t) * ccdf(t / omega); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double total = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double e = 0.0;
    double seg_tol = opt.tolerance / static_cast<double>(pts.size());
    double v = GK::integrate(f, pts[i], pts[i + 1], 0, 0.0, &e);
    if (e > seg_tol) v = GK::integrate(f, pts[i], pts[i + 1], opt.max_depth, 1e-11, &e);
    total += v;
    err += e;
  }
  // remaining mass beyond the last point is below e^-64
  if (err > opt.tolerance) {
    std::ostringstream os;
    os << "lst_numeric: quadrature error bound " << err << " exceeds tolerance " << opt.tolerance;
    throw QuadratureError(os.str(), err);
  }
  return 1.0 - total;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::Pareto: return "pareto";
    case Family::Exponential: return "exponential";
    case Family::Deterministic: return "deterministic";
    case Family::Mixture: return "mixture";
  }
  return "?";
}

HeavyTailRV HeavyTailRV::pareto(double x_m, double nu) {
  if (!(x_m > 0.0) || !std::isfinite(x_m)) throw std::invalid_argument("pareto: x_m must be > 0");
  if (!(nu > 1.0) || !std::isfinite(nu)) throw std::invalid_argument("pareto: nu must be > 1");
  return HeavyTailRV(Family::Pareto, x_m, nu);
}

HeavyTailRV HeavyTailRV::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("exponential: rate must be > 0");
  return HeavyTailRV(Family::Exponential, rate, 0.0);
}

HeavyTailRV HeavyTailRV::deterministic(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw std::invalid_argument("deterministic: value must be >= 0");
  return HeavyTailRV(Family::Deterministic, value, 0.0);
}

HeavyTailRV HeavyTailRV::mixture(std::vector<double> weights, std::vector<HeavyTailRV> components) {
  if (weights.empty() || weights.size() != components.size())
    throw std::invalid_argument("mixture: need one weight per component");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("mixture: weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("mixture: weights must sum to 1");
  for (auto& w : weights) w /= sum;
  HeavyTailRV rv(Family::Mixture, 0.0, 0.0);
  rv.cumw_ = cumulative(weights);
  rv.weights_ = std::move(weights);
  rv.components_ = std::move(components);
  return rv;
}

double HeavyTailRV::mean() const {
  switch (family_) {
    case Family::Pareto: return b_ * a_ / (b_ - 1.0);
    case Family::Exponential: return 1.0 / a_;
    case Family::Deterministic: return a_;
    case Family::Mixture: {
      double m = 0.0;
      for (std::size_t i = 0; i < weights_.size(); ++i) m += weights_[i] * components_[i].mean();
      return m;
    }
  }
  return kInf;
}

double HeavyTailRV::second_moment() const {
  switch (family_) {
    case Family::Pareto: return b_ > 2.0 ? b_ * a_ * a_ / (b_ - 2.0) : kInf;
    case Family::Exponential: return 2.0 / (a_ * a_);
    case Family::Deterministic: return a_ * a_;
    case Family::Mixture: {
      double m = 0.0;
      for (std::size_t i = 0; i < weights_.size(); ++i) m += weights_[i] * components_[i].second_moment();
      return m;
    }
  }
  return kInf;
}

double HeavyTailRV::ccdf(double x) const {
  switch (family_) {
    case Family::Pareto: return x < a_ ? 1.0 : std::pow(a_ / x, b_);
    case Family::Exponential: return x <= 0.0 ? 1.0 : std::exp(-a_ * x);
    case Family::Deterministic: return x < a_ ? 1.0 : 0.0;
    case Family::Mixture: {
      double p = 0.0;
      for (std::size_t i = 0; i < weights_.size(); ++i) p += weights_[i] * components_[i].ccdf(x);
      return std::min(1.0, p);
    }
  }
  return 0.0;
}

bool HeavyTailRV::has_power_tail() const { return std::isfinite(tail_index()); }

double HeavyTailRV::tail_index() const {
  switch (family_) {
    case Family::Pareto: return b_;
    case Family::Mixture: {
      double nu = kInf;
      for (std::size_t i = 0; i < weights_.size(); ++i)
        if (weights_[i] > 0.0) nu = std::min(nu, components_[i].tail_index());
      return nu;
    }
    default: return kInf;
  }
}

double HeavyTailRV::from_uniform(double u) const {
  switch (family_) {
    case Family::Pareto: return a_ * std::pow(u, -1.0 / b_);
    case Family::Exponential: return -std::log(u) / a_;
    case Family::Deterministic: return a_;
    case Family::Mixture: break;
  }
  throw std::logic_error("from_uniform: mixture needs two uniforms");
}

double HeavyTailRV::sample(Stream& s) const {
  if (family_ != Family::Mixture) return from_uniform(s.uniform());
  return components_[pick(cumw_, s.uniform())].sample(s);
}

HeavyTailRV HeavyTailRV::scaled(double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("scaled: factor must be > 0");
  switch (family_) {
    case Family::Pareto: return pareto(a_ * s, b_);
    case Family::Exponential: return exponential(a_ / s);
    case Family::Deterministic: return deterministic(a_ * s);
    case Family::Mixture: {
      std::vector<HeavyTailRV> comps;
      for (const auto& c : components_) comps.push_back(c.scaled(s));
      return mixture(weights_, std::move(comps));
    }
  }
  return *this;
}

std::string HeavyTailRV::describe() const {
  std::ostringstream os;
  os.precision(6);
  switch (family_) {
    case Family::Pareto: os << "Pareto(x_m=" << a_ << ", nu=" << b_ << ")"; break;
    case Family::Exponential: os << "Exponential(rate=" << a_ << ")"; break;
    case Family::Deterministic: os << "Deterministic(" << a_ << ")"; break;
    case Family::Mixture:
      os << "Mixture(";
      for (std::size_t i = 0; i < weights_.size(); ++i)
        os << (i ? ", " : "") << weights_[i] << "*" << components_[i].describe();
      os << ")";
      break;
  }
  return os.str();
}

KvDoc HeavyTailRV::to_kv() const {
  KvDoc d;
  d.set("family", to_string(family_));
  switch (family_) {
    case Family::Pareto:
      d.set("x_m", format_double(a_));
      d.set("nu", format_double(b_));
      break;
    case Family::Exponential: d.set("rate", format_double(a_)); break;
    case Family::Deterministic: d.set("value", format_double(a_)); break;
    case Family::Mixture:
      d.set("components", std::to_string(components_.size()));
      for (std::size_t i = 0; i < components_.size(); ++i) {
        KvDoc c = components_[i].to_kv();
        c.set("weight", format_double(weights_[i]));
        d.merge(c, std::to_string(i));
      }
      break;
  }
  return d;
}

HeavyTailRV HeavyTailRV::from_kv(const KvDoc& doc) {
  const std::string& fam = doc.str("family");
  if (fam == "pareto") return pareto(doc.num("x_m"), doc.num("nu"));
  if (fam == "exponential") {
    if (doc.has("mean")) return exponential(1.0 / doc.num("mean"));
    return exponential(doc.num("rate"));
  }
  if (fam == "deterministic") return deterministic(doc.num("value"));
  if (fam == "mixture") {
    long long n = doc.integer("components");
    if (n <= 0) throw ConfigError("mixture: components must be positive");
    std::vector<double> w;
    std::vector<HeavyTailRV> comps;
    for (long long i = 0; i < n; ++i) {
      KvDoc c = doc.sub(std::to_string(i));
      w.push_back(c.num("weight"));
      comps.push_back(from_kv(c));
    }
    return mixture(std::move(w), std::move(comps));
  }
  throw ConfigError("unknown distribution family '" + fam + "'");
}

TailConstant tail_constant(const HeavyTailRV& rv) {
  switch (rv.family()) {
    case Family::Pareto: {
      double nu = rv.nu();
      if (is_integer(nu)) throw std::invalid_argument("tail_constant: integer tail index is a pole of Gamma(1 - nu)");
      return {-std::tgamma(1.0 - nu) * std::pow(rv.x_m(), nu), nu};
    }
    case Family::Mixture: {
      double nu = rv.tail_index();
      if (!std::isfinite(nu)) throw std::invalid_argument("tail_constant: mixture has no power-tailed component");
      double C = 0.0;
      for (std::size_t i = 0; i < rv.weights().size(); ++i) {
        const auto& c = rv.components()[i];
        if (rv.weights()[i] > 0.0 && c.has_power_tail() && std::abs(c.tail_index() - nu) < 1e-12)
          C += rv.weights()[i] * tail_constant(c).C;
      }
      return {C, nu};
    }
    default:
      throw std::invalid_argument("tail_constant: " + to_string(rv.family()) + " has no power tail");
  }
}

ResidualRV::ResidualRV(HeavyTailRV base) : base_(std::move(base)), mean_base_(base_.mean()) {
  if (!std::isfinite(mean_base_) || !(mean_base_ > 0.0))
    throw std::invalid_argument("residual: base must have finite positive mean");
  if (base_.family() == Family::Mixture) {
    for (std::size_t i = 0; i < base_.components().size(); ++i) {
      const auto& c = base_.components()[i];
      double w = base_.weights()[i] * c.mean() / mean_base_;
      if (w <= 0.0) continue;
      parts_.emplace_back(c);
      partw_.push_back(w);
    }
    cumw_ = cumulative(partw_);
  }
}

double ResidualRV::ccdf(double x) const {
  if (x <= 0.0) return 1.0;
  switch (base_.family()) {
    case Family::Pareto: {
      double xm = base_.x_m(), nu = base_.nu();
      if (x <= xm) return 1.0 - x / mean_base_;
      return std::pow(xm / x, nu - 1.0) / nu;
    }
    case Family::Exponential: return std::exp(-base_.rate() * x);
    case Family::Deterministic: return x < base_.value() ? 1.0 - x / base_.value() : 0.0;
    case Family::Mixture: {
      double p = 0.0;
      for (std::size_t i = 0; i < parts_.size(); ++i) p += partw_[i] * parts_[i].ccdf(x);
      return std::min(1.0, p);
    }
  }
  return 0.0;
}

double ResidualRV::mean() const { return base_.second_moment() / (2.0 * mean_base_); }

double ResidualRV::from_uniform(double u) const {
  switch (base_.family()) {
    case Family::Pareto: {
      double nu = base_.nu();
      if (u >= 1.0 / nu) return mean_base_ * (1.0 - u);
      return base_.x_m() * std::pow(nu * u, -1.0 / (nu - 1.0));
    }
    case Family::Exponential: return -std::log(u) / base_.rate();
    case Family::Deterministic: return base_.value() * (1.0 - u);
    case Family::Mixture: break;
  }
  throw std::logic_error("from_uniform: mixture needs two uniforms");
}

double ResidualRV::sample(Stream& s) const {
  if (base_.family() != Family::Mixture) return from_uniform(s.uniform());
  return parts_[pick(cumw_, s.uniform())].sample(s);
}

ResidualRV residual(const HeavyTailRV& rv) { return ResidualRV(rv); }

double lst_numeric(const HeavyTailRV& rv, double omega, const LstOptions& opt) {
  std::vector<double> scales;
  collect_scales(rv, scales);
  return lst_by_parts([&](double x) { return rv.ccdf(x); }, scales, omega, opt);
}

double lst_numeric(const ResidualRV& rv, double omega, const LstOptions& opt) {
  std::vector<double> scales;
  collect_scales(rv.base(), scales);
  return lst_by_parts([&](double x) { return rv.ccdf(x); }, scales, omega, opt);
}

double positive_stable_from_uniforms(double alpha, double u, double e) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("positive stable: alpha must be in (0,1)");
  const double pi = M_PI;
  double log_a = (alpha * std::log(std::sin(alpha * pi * u)) +
                  (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * pi * u)) - std::log(std::sin(pi * u))) /
                 (1.0 - alpha);
  return std::exp((1.0 - alpha) / alpha * (log_a - std::log(e)));
}

double sample_positive_stable(double alpha, Stream& s) {
  double u = s.uniform();
  double e = s.exponential();
  return positive_stable_from_uniforms(alpha, u, e);
}

}  // namespace htq
