#include "htq/asymptotics.hpp"

#include <cmath>
#include <sstream>

namespace htq {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

bool lighter_family(const HeavyTailRV& rv) {
  return rv.family() == Family::Exponential || rv.family() == Family::Deterministic;
}

// tail constant of a power-tailed law whose index must lie in (1, 2)
TailConstant heavy_constant(const HeavyTailRV& rv, const char* who) {
  if (!rv.has_power_tail()) throw ModelError(std::string(who) + ": needs a power-tailed law, got " + rv.describe());
  double nu = rv.tail_index();
  if (!(nu > 1.0 && nu < 2.0))
    throw ModelError(std::string(who) + ": tail index must lie in (1,2), got " + num(nu));
  return tail_constant(rv);
}

}  // namespace

void LstDecomposition::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ModelError("decomposition: alpha must be in (0,1], got " + num(alpha));
  if (!(kappa > 0.0)) throw ModelError("decomposition: kappa must be > 0, got " + num(kappa));
  if (!(g0 > 0.0)) throw ModelError("decomposition: G(0) must be > 0, got " + num(g0));
  if (std::abs(f0 + g0 - 1.0) > 1e-9) throw ModelError("decomposition: F(0) + G(0) must equal 1");
}

double PowerTailAsymptote::ccdf(double x) const {
  return c_pref / std::tgamma(1.0 - alpha) * std::pow(x, -alpha);
}

double PowerTailAsymptote::level_for(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("level_for: p must be in (0,1)");
  return std::pow(c_pref / (std::tgamma(1.0 - alpha) * p), 1.0 / alpha);
}

void Mg1Spec::validate() const {
  if (!(lambda >= 0.0)) throw ModelError("mg1: lambda must be >= 0");
  if (!(lambda < lambda_star()))
    throw ModelError("mg1: unstable, lambda = " + num(lambda) + " must be < lambda* = 1/beta = " + num(lambda_star()));
}

void Mg1SpeedSpec::validate() const {
  if (!(c > 0.0)) throw ModelError("mg1 speed: c must be > 0");
  if (!(lambda_hat >= 0.0)) throw ModelError("mg1 speed: lambda_hat must be >= 0");
  if (!(lambda_hat < lambda_star()))
    throw ModelError("mg1 speed: unstable, lambda_hat = " + num(lambda_hat) + " must be < lambda* = c/beta = " +
                     num(lambda_star()));
}

double MultiClassSpec::beta() const {
  double b = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) b += p[i] * services[i].mean();
  return b;
}

HeavyTailRV MultiClassSpec::aggregate_service() const { return HeavyTailRV::mixture(p, services); }

void MultiClassSpec::validate() const {
  if (p.empty() || p.size() != services.size()) throw ModelError("multiclass: need one service law per class");
  if (i0 >= p.size()) throw ModelError("multiclass: heavy class index out of range");
  double s = 0.0;
  for (double v : p) {
    if (!(v > 0.0)) throw ModelError("multiclass: class probabilities must be > 0");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) throw ModelError("multiclass: class probabilities must sum to 1");
  if (!(lambda >= 0.0 && lambda < lambda_star()))
    throw ModelError("multiclass: unstable, lambda = " + num(lambda) + " must be < lambda* = " + num(lambda_star()));
}

void FluidSpec::validate() const {
  if (!(d > 0.0)) throw ModelError("fluid: drain rate d must be > 0");
  if (!(r > d)) throw ModelError("fluid: need r > d, got r = " + num(r) + ", d = " + num(d));
  if (!(rho() < d)) throw ModelError("fluid: unstable, rho = p_on r = " + num(rho()) + " must be < d = " + num(d));
}

void AltSpeedSpec::validate_basic() const {
  if (!(s_high > 0.0)) throw ModelError("altspeed: s_H must be > 0");
  if (!(s_low >= 0.0 && s_low <= s_high)) throw ModelError("altspeed: need 0 <= s_L <= s_H");
  if (!(nu_rate > 0.0)) throw ModelError("altspeed: nu_rate must be > 0");
  if (!(lambda >= 0.0 && lambda < lambda_star()))
    throw ModelError("altspeed: unstable, lambda = " + num(lambda) + " must be < lambda* = s_bar/beta = " +
                     num(lambda_star()));
}

void AltSpeedSpec::validate() const {
  validate_basic();
  if (!(lambda * beta() > s_low))
    throw ModelError("altspeed: need lambda beta > s_L, got " + num(lambda * beta()) + " <= " + num(s_low));
}

void Mg2Spec::validate() const {
  if (!(mu > 0.0)) throw ModelError("mg2: mu must be > 0");
  if (!(lambda > mu)) throw ModelError("mg2: need lambda > mu, got lambda = " + num(lambda) + ", mu = " + num(mu));
  if (!(lambda < lambda_star()))
    throw ModelError("mg2: unstable, lambda = " + num(lambda) + " must be < lambda* = mu + 1/beta = " +
                     num(lambda_star()));
}

double Mg2Occupancy::identity_residual(const Mg2Spec& s) const {
  double ib = 1.0 / s.beta();
  return ib * pi0 + s.mu * pi0 + ib * pi1 + s.mu * pi2 - (ib + s.mu - s.lambda);
}

double HtLimitPlan::lambda_eps(double eps) const {
  return lambda_star * (1.0 - h * std::pow(eps, alpha) / zeta);
}

double HtLimitPlan::hat_lambda_eps(double eps) const {
  return hat_lambda_star * (1.0 - h * std::pow(eps, alpha));
}

double HtLimitPlan::coupling_residual(double eps) const {
  return (hat_lambda_star - hat_lambda_eps(eps)) / hat_lambda_star -
         zeta * (lambda_star - lambda_eps(eps)) / lambda_star;
}

PowerTailAsymptote prop1_tail(const LstDecomposition& d) {
  if (!(d.alpha > 0.0 && d.alpha < 1.0)) throw ModelError("prop1_tail: alpha must be in (0,1)");
  double c = d.theta + d.gamma + d.kappa * d.g0;
  if (!(c > 0.0)) throw ModelError("prop1_tail: tail prefactor must be > 0, got " + num(c));
  return {c, d.alpha};
}

LstDecomposition mg1_decomposition(const Mg1Spec& spec) {
  spec.validate();
  const auto& b = spec.service;
  double beta = spec.beta();
  double load = spec.lambda / (spec.lambda_star() - spec.lambda);
  LstDecomposition d;
  double nu = b.tail_index();
  if (std::abs(nu - 2.0) < 1e-12)
    throw ModelError("mg1: tail index 2 is a boundary case outside both branches");
  if (nu > 1.0 && nu < 2.0) {
    d.alpha = nu - 1.0;
    d.kappa = load * tail_constant(b).C / beta;
  } else {
    double b2 = b.second_moment();
    if (!std::isfinite(b2)) throw ModelError("mg1: service needs tail index in (1,2) or a finite second moment");
    d.alpha = 1.0;
    d.kappa = load * b2 / (2.0 * beta);
  }
  if (!(d.kappa > 0.0)) throw ModelError("mg1: kappa vanishes at lambda = 0");
  return d;
}

PowerTailAsymptote mg1_speed_tail(const Mg1SpeedSpec& spec) {
  spec.validate();
  auto tc = heavy_constant(spec.service, "mg1_speed_tail");
  return {spec.lambda_hat * tc.C / (spec.c - spec.lambda_hat * spec.beta()), tc.nu - 1.0};
}

PowerTailAsymptote fluid_tail(const FluidSpec& spec) {
  spec.validate();
  auto tc = heavy_constant(spec.on, "fluid_tail");
  double p = spec.p_on(), rho = spec.rho();
  double c = (1.0 - p) * rho / (spec.d - rho) * (tc.C / spec.on.mean()) * std::pow(spec.r - spec.d, tc.nu - 1.0);
  return {c, tc.nu - 1.0};
}

double matching_speed(const FluidSpec& fluid, double lambda_hat) {
  fluid.validate();
  double p = fluid.p_on();
  if (!(p > 0.0 && p < 1.0)) throw ModelError("matching_speed: p_on must lie strictly in (0,1)");
  if (!(lambda_hat > 0.0)) throw ModelError("matching_speed: lambda_hat must be > 0");
  double rho = fluid.rho();
  double beta_hat = (fluid.r - fluid.d) * fluid.on.mean();
  return (fluid.d - p * rho) / (rho - p * rho) * lambda_hat * beta_hat;
}

Mg1SpeedSpec matched_mg1(const FluidSpec& fluid, double lambda_hat) {
  return {lambda_hat, matching_speed(fluid, lambda_hat), fluid.on.scaled(fluid.r - fluid.d)};
}

MultiClassConstants multiclass_constants(const MultiClassSpec& spec) {
  spec.validate();
  auto tc = heavy_constant(spec.services[spec.i0], "multiclass");
  for (std::size_t i = 0; i < spec.services.size(); ++i)
    if (i != spec.i0 && !lighter_family(spec.services[i]))
      throw ModelError("multiclass: non-heavy classes must be Exponential or Deterministic");
  double beta0 = spec.services[spec.i0].mean();
  double p0 = spec.p[spec.i0];
  double rho = spec.rho();
  MultiClassConstants out;
  out.decomposition.alpha = tc.nu - 1.0;
  out.decomposition.kappa = spec.rho_class(spec.i0) / (1.0 - rho) * tc.C / beta0;
  if (!(out.decomposition.kappa > 0.0)) throw ModelError("multiclass: kappa vanishes at lambda = 0");
  double others = 0.0;
  for (std::size_t i = 0; i < spec.p.size(); ++i)
    if (i != spec.i0) others += spec.rho_class(i);
  out.reduced = {p0 * spec.lambda, 1.0 - others, spec.services[spec.i0]};
  out.reduced_ht = {p0 * spec.lambda, spec.lambda_star() * p0 * beta0, spec.services[spec.i0]};
  out.zeta = spec.beta() / (p0 * beta0);
  return out;
}

AltCase parse_alt_case(const std::string& s) {
  if (s == "a" || s == "A") return AltCase::A;
  if (s == "b" || s == "B") return AltCase::B;
  if (s == "c" || s == "C") return AltCase::C;
  throw std::invalid_argument("unknown alternating-speed case '" + s + "' (expected a, b or c)");
}

std::string to_string(AltCase c) {
  switch (c) {
    case AltCase::A: return "a";
    case AltCase::B: return "b";
    case AltCase::C: return "c";
  }
  return "?";
}

AltSpeedConstants altspeed_constants(const AltSpeedSpec& spec, AltCase c) {
  spec.validate();
  double nd = spec.nu_rate * spec.delta();
  double excess = spec.lambda * spec.beta() - spec.s_low;
  double eta = 0.0, alpha = 0.0;
  switch (c) {
    case AltCase::A: {
      auto tb = heavy_constant(spec.service, "altspeed case a");
      if (!lighter_family(spec.low)) throw ModelError("altspeed case a: low-speed periods must be Exponential or Deterministic");
      eta = spec.lambda * (1.0 + nd) * tb.C;
      alpha = tb.nu - 1.0;
      break;
    }
    case AltCase::B: {
      auto td = heavy_constant(spec.low, "altspeed case b");
      if (!lighter_family(spec.service)) throw ModelError("altspeed case b: service must be Exponential or Deterministic");
      eta = spec.nu_rate * std::pow(excess, td.nu) * td.C;
      alpha = td.nu - 1.0;
      break;
    }
    case AltCase::C: {
      auto tb = heavy_constant(spec.service, "altspeed case c");
      auto td = heavy_constant(spec.low, "altspeed case c");
      if (std::abs(tb.nu - td.nu) > 1e-12) throw ModelError("altspeed case c: service and low periods need equal tail index");
      eta = spec.lambda * (1.0 + nd) * tb.C + spec.nu_rate * std::pow(excess, td.nu) * td.C;
      alpha = tb.nu - 1.0;
      break;
    }
  }
  AltSpeedConstants out;
  out.eta = eta;
  out.decomposition.alpha = alpha;
  out.decomposition.kappa = eta / ((1.0 + nd) * (spec.s_bar() - spec.lambda * spec.beta()));
  out.asymptote = prop1_tail(out.decomposition);
  return out;
}

AltSpeedRefSystems altspeed_refsystems(const AltSpeedSpec& spec) {
  spec.validate();
  AltSpeedRefSystems out;
  out.ref_a = {spec.lambda, spec.s_bar(), spec.service};
  out.ref_b.r = spec.s_high - spec.s_low;
  out.ref_b.d = spec.s_high - spec.lambda * spec.beta();
  out.ref_b.on = spec.low;
  out.ref_b.off = HeavyTailRV::exponential(spec.nu_rate);
  if (!(out.ref_b.r > 0.0)) throw ModelError("altspeed: reference system B degenerates when s_H = s_L");
  out.ref_b.validate();
  return out;
}

Mg1SpeedSpec altspeed_refb_image(const AltSpeedSpec& spec) {
  spec.validate();
  double d = spec.s_high - spec.lambda * spec.beta();
  return {spec.nu_rate / d, 1.0, spec.low.scaled(spec.lambda * spec.beta() - spec.s_low)};
}

HtLimitPlan ht_plan(const LstDecomposition& d, double zeta, const Mg1SpeedSpec& hat, double lambda,
                    double lambda_star) {
  if (!(d.kappa > 0.0)) throw ModelError("ht_plan: kappa must be > 0");
  if (!(d.alpha > 0.0 && d.alpha <= 1.0)) throw ModelError("ht_plan: alpha must be in (0,1]");
  if (!(zeta > 0.0)) throw ModelError("ht_plan: zeta must be > 0");
  HtLimitPlan p;
  p.alpha = d.alpha;
  p.kappa = d.kappa;
  p.law = d.alpha == 1.0 ? LimitLaw::UnitExponential : LimitLaw::MittagLeffler;
  p.scaling = std::pow(d.kappa, -1.0 / d.alpha);
  p.zeta = zeta;
  p.lambda = lambda;
  p.lambda_star = lambda_star;
  p.hat_lambda_star = hat.lambda_star();
  if (d.alpha < 1.0) {
    p.h = tail_constant(hat.service).C / hat.beta();
  } else {
    double b2 = hat.service.second_moment();
    if (!std::isfinite(b2)) throw ModelError("ht_plan: exponential limit needs finite second moment");
    p.h = b2 / (2.0 * hat.beta());
  }
  p.slack_scaling = std::pow((lambda_star - lambda) / lambda_star * zeta / p.h, 1.0 / d.alpha);
  return p;
}

HtLimitPlan mg1_ht_plan(const Mg1Spec& spec) {
  return ht_plan(mg1_decomposition(spec), 1.0, {spec.lambda, 1.0, spec.service}, spec.lambda, spec.lambda_star());
}

HtLimitPlan altspeed_ht(const AltSpeedSpec& spec, AltCase c) {
  auto k = altspeed_constants(spec, c);
  double nd = spec.nu_rate * spec.delta();
  double sbar = spec.s_bar();
  switch (c) {
    case AltCase::A:
      return ht_plan(k.decomposition, 1.0, {spec.lambda, sbar, spec.service}, spec.lambda, spec.lambda_star());
    case AltCase::B: {
      // Reference System B image at critical load: lambda beta -> s_bar
      Mg1SpeedSpec hat{spec.nu_rate / (spec.s_high - spec.lambda * spec.beta()), 1.0,
                       spec.low.scaled(sbar - spec.s_low)};
      double zeta = (1.0 + nd) * sbar / (nd * (sbar - spec.s_low));
      return ht_plan(k.decomposition, zeta, hat, spec.lambda, spec.lambda_star());
    }
    case AltCase::C: break;
  }
  throw ModelError("altspeed_ht: case c has no reference system");
}

Mg1SpeedSpec mg2_hat(const Mg2Spec& spec) {
  return {spec.lambda, 1.0, spec.service.scaled(1.0 / (1.0 + spec.mu * spec.beta()))};
}

Mg2Constants mg2_constants(const Mg2Spec& spec, const Mg2Occupancy& occ, double identity_tolerance) {
  spec.validate();
  auto tc = heavy_constant(spec.service, "mg2");
  for (double v : {occ.pi0, occ.pi1, occ.pi2})
    if (!(v >= 0.0 && v <= 1.0)) throw ModelError("mg2: occupancies must be probabilities");
  double res = occ.identity_residual(spec);
  if (std::abs(res) > identity_tolerance)
    throw ModelError("mg2: occupancy identity residual " + num(res) + " exceeds tolerance " + num(identity_tolerance));
  double lam = spec.lambda, mu = spec.mu, beta = spec.beta();
  double lm = lam - mu;
  double denom = 1.0 - lm * beta;
  double x = lam * occ.pi0 + lam * occ.pi1 - mu * occ.pi1;
  double shape = std::pow(lm / lam, tc.nu - 1.0);

  Mg2Constants out;
  auto& d = out.decomposition;
  d.alpha = tc.nu - 1.0;
  d.theta = 0.0;
  d.g0 = (lm * x * beta + mu * occ.pi2) / (lm * denom);
  d.f0 = 1.0 - d.g0;
  d.gamma = x * tc.C / denom * shape;
  d.kappa = lm * tc.C / denom * shape;
  out.asymptote = prop1_tail(d);
  out.simplified_c_w = (1.0 - occ.pi0 - occ.pi1) / denom * (tc.C / beta) * shape;

  Mg1SpeedSpec hat = mg2_hat(spec);
  double zeta = std::pow(1.0 + mu * beta, tc.nu) * (beta / tc.C) * (tail_constant(hat.service).C / hat.beta());
  out.plan = ht_plan(d, zeta, hat, lam, spec.lambda_star());

  double busy2 = 1.0 - occ.pi0 - occ.pi1;
  if (!(busy2 > 0.0)) throw ModelError("mg2: server 2 never busy under the given occupancies");
  HeavyTailRV a = spec.service.scaled(mu / lam);
  double cycle = beta / busy2;
  double p_on = a.mean() / cycle;
  out.fluid.on = a;
  out.fluid.off = HeavyTailRV::exponential(1.0 / (cycle - a.mean()));
  out.fluid.r = (lam / mu - lam * beta / (1.0 + beta * mu)) / (1.0 - p_on);
  out.fluid.d = out.fluid.r - (lam / mu - 1.0);
  return out;
}

nlohmann::json to_json(const LstDecomposition& d) {
  return {{"alpha", d.alpha}, {"theta", d.theta}, {"gamma", d.gamma},
          {"kappa", d.kappa}, {"g0", d.g0},       {"f0", d.f0}};
}

nlohmann::json to_json(const PowerTailAsymptote& a) {
  return {{"c_pref", a.c_pref}, {"alpha", a.alpha}};
}

nlohmann::json to_json(const HtLimitPlan& p) {
  return {{"scaling", p.scaling},
          {"slack_scaling", p.slack_scaling},
          {"law", p.law == LimitLaw::MittagLeffler ? "mittag-leffler" : "unit-exponential"},
          {"alpha", p.alpha},
          {"zeta", p.zeta},
          {"kappa", p.kappa},
          {"lambda", p.lambda},
          {"lambda_star", p.lambda_star},
          {"hat_lambda_star", p.hat_lambda_star},
          {"h", p.h}};
}

nlohmann::json to_json(const HeavyTailRV& rv) {
  nlohmann::json j;
  KvDoc kv = rv.to_kv();
  for (const auto& [k, v] : kv.entries()) j[k] = v;
  j["mean"] = rv.mean();
  return j;
}

nlohmann::json to_json(const Mg1SpeedSpec& s) {
  return {{"lambda_hat", s.lambda_hat}, {"c", s.c}, {"service", to_json(s.service)}, {"beta_hat", s.beta()}};
}

nlohmann::json to_json(const FluidSpec& s) {
  return {{"r", s.r}, {"d", s.d}, {"on", to_json(s.on)}, {"off", to_json(s.off)}, {"p_on", s.p_on()}, {"rho", s.rho()}};
}

}  // namespace htq
