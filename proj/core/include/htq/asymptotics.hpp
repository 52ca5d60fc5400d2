#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "htq/dist.hpp"

namespace htq {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Small-omega data of E[e^{-wV}] = F(w) + G(w) / (1 + H(w)) with
// F(w) - F(0) ~ theta w^alpha, G(w) - G(0) ~ gamma w^alpha, H(w) ~ kappa w^alpha.
struct LstDecomposition {
  double alpha = 0.5;
  double theta = 0.0;
  double gamma = 0.0;
  double kappa = 1.0;
  double g0 = 1.0;
  double f0 = 0.0;

  void validate() const;
};

// P(V > x) ~ c_pref / Gamma(1 - alpha) x^-alpha
struct PowerTailAsymptote {
  double c_pref = 0.0;
  double alpha = 0.5;

  double ccdf(double x) const;
  // x with ccdf(x) = p
  double level_for(double p) const;
};

struct Mg1Spec {
  double lambda = 0.0;
  HeavyTailRV service = HeavyTailRV::exponential(1.0);

  double beta() const { return service.mean(); }
  double rho() const { return lambda * beta(); }
  double lambda_star() const { return 1.0 / beta(); }
  void validate() const;
};

struct Mg1SpeedSpec {
  double lambda_hat = 0.0;
  double c = 1.0;
  HeavyTailRV service = HeavyTailRV::exponential(1.0);

  double beta() const { return service.mean(); }
  double rho() const { return lambda_hat * beta() / c; }
  double lambda_star() const { return c / beta(); }
  void validate() const;
};

struct MultiClassSpec {
  double lambda = 0.0;
  std::vector<double> p;
  std::vector<HeavyTailRV> services;
  std::size_t i0 = 0;

  double beta() const;
  double rho_class(std::size_t i) const { return lambda * p.at(i) * services.at(i).mean(); }
  double rho() const { return lambda * beta(); }
  double lambda_star() const { return 1.0 / beta(); }
  HeavyTailRV aggregate_service() const;
  void validate() const;
};

struct FluidSpec {
  double r = 2.0;
  double d = 1.0;
  HeavyTailRV on = HeavyTailRV::exponential(1.0);
  HeavyTailRV off = HeavyTailRV::exponential(1.0);

  double p_on() const { return on.mean() / (on.mean() + off.mean()); }
  double rho() const { return p_on() * r; }
  void validate() const;
};

struct AltSpeedSpec {
  double lambda = 0.0;
  HeavyTailRV service = HeavyTailRV::exponential(1.0);
  double s_low = 0.0;
  double s_high = 1.0;
  double nu_rate = 1.0;
  HeavyTailRV low = HeavyTailRV::exponential(1.0);

  double beta() const { return service.mean(); }
  double delta() const { return low.mean(); }
  double s_bar() const { return (s_high + nu_rate * delta() * s_low) / (1.0 + nu_rate * delta()); }
  double lambda_star() const { return s_bar() / beta(); }
  double p_high() const { return 1.0 / (1.0 + nu_rate * delta()); }
  // stability and speed ordering only
  void validate_basic() const;
  // additionally lambda * beta > s_low
  void validate() const;
};

struct Mg2Spec {
  double lambda = 0.0;
  double mu = 1.0;
  HeavyTailRV service = HeavyTailRV::exponential(1.0);

  double beta() const { return service.mean(); }
  double lambda_star() const { return mu + 1.0 / beta(); }
  void validate() const;
};

struct Mg2Occupancy {
  double pi0 = 0.0;
  double pi1 = 0.0;
  double pi2 = 0.0;

  // lhs - rhs of the rate-balance identity
  double identity_residual(const Mg2Spec& spec) const;
};

enum class LimitLaw { MittagLeffler, UnitExponential };

struct HtLimitPlan {
  double scaling = 1.0;        // kappa^{-1/alpha}
  double slack_scaling = 1.0;  // same limit written through the relative slack
  LimitLaw law = LimitLaw::MittagLeffler;
  double alpha = 0.5;
  double zeta = 1.0;
  double kappa = 1.0;
  double lambda = 0.0;
  double lambda_star = 1.0;
  double hat_lambda_star = 1.0;
  double h = 1.0;  // C_hat / beta_hat, or beta_hat2 / (2 beta_hat) when alpha = 1

  double lambda_eps(double eps) const;
  double hat_lambda_eps(double eps) const;
  double coupling_residual(double eps) const;
};

PowerTailAsymptote prop1_tail(const LstDecomposition& d);

LstDecomposition mg1_decomposition(const Mg1Spec& spec);
PowerTailAsymptote mg1_speed_tail(const Mg1SpeedSpec& spec);
PowerTailAsymptote fluid_tail(const FluidSpec& spec);

double matching_speed(const FluidSpec& fluid, double lambda_hat);
// M/G/1 with speed matching_speed(fluid, lambda_hat) and service (r - d) A
Mg1SpeedSpec matched_mg1(const FluidSpec& fluid, double lambda_hat);

struct MultiClassConstants {
  LstDecomposition decomposition;
  Mg1SpeedSpec reduced;
  Mg1SpeedSpec reduced_ht;
  double zeta;
};
MultiClassConstants multiclass_constants(const MultiClassSpec& spec);

enum class AltCase { A, B, C };
AltCase parse_alt_case(const std::string& s);
std::string to_string(AltCase c);

struct AltSpeedConstants {
  double eta;
  LstDecomposition decomposition;
  PowerTailAsymptote asymptote;
};
AltSpeedConstants altspeed_constants(const AltSpeedSpec& spec, AltCase c);

struct AltSpeedRefSystems {
  Mg1SpeedSpec ref_a;
  FluidSpec ref_b;
};
AltSpeedRefSystems altspeed_refsystems(const AltSpeedSpec& spec);
// Reference System B seen at On-starts: M/G/1 with rate nu_rate/d and service (lambda beta - s_L) D
Mg1SpeedSpec altspeed_refb_image(const AltSpeedSpec& spec);

HtLimitPlan ht_plan(const LstDecomposition& d, double zeta, const Mg1SpeedSpec& hat, double lambda,
                    double lambda_star);
HtLimitPlan mg1_ht_plan(const Mg1Spec& spec);
HtLimitPlan altspeed_ht(const AltSpeedSpec& spec, AltCase c);

struct Mg2Constants {
  LstDecomposition decomposition;
  PowerTailAsymptote asymptote;
  HtLimitPlan plan;
  FluidSpec fluid;
  double simplified_c_w;
};
Mg2Constants mg2_constants(const Mg2Spec& spec, const Mg2Occupancy& occ, double identity_tolerance = 1e-9);
// heavy-traffic reference: B_hat = B / (1 + mu beta), c = 1
Mg1SpeedSpec mg2_hat(const Mg2Spec& spec);

nlohmann::json to_json(const LstDecomposition& d);
nlohmann::json to_json(const PowerTailAsymptote& a);
nlohmann::json to_json(const HtLimitPlan& p);
nlohmann::json to_json(const Mg1SpeedSpec& s);
nlohmann::json to_json(const FluidSpec& s);
nlohmann::json to_json(const HeavyTailRV& rv);

}  // namespace htq
