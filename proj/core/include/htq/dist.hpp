#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "htq/kv.hpp"
#include "htq/rng.hpp"

namespace htq {

enum class Family { Pareto, Exponential, Deterministic, Mixture };

std::string to_string(Family f);

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved_error() const { return achieved_; }

 private:
  double achieved_;
};

// Tail constant in the transform convention P(X > x) ~ -C / Gamma(1 - nu) x^-nu.
struct TailConstant {
  double C;
  double nu;
};

class HeavyTailRV {
 public:
  static HeavyTailRV pareto(double x_m, double nu);
  static HeavyTailRV exponential(double rate);
  static HeavyTailRV deterministic(double value);
  static HeavyTailRV mixture(std::vector<double> weights, std::vector<HeavyTailRV> components);

  Family family() const { return family_; }
  double x_m() const { return a_; }
  double nu() const { return b_; }
  double rate() const { return a_; }
  double value() const { return a_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<HeavyTailRV>& components() const { return components_; }

  double mean() const;
  // +inf when not finite
  double second_moment() const;
  double ccdf(double x) const;
  double cdf(double x) const { return 1.0 - ccdf(x); }
  bool has_power_tail() const;
  // tail index of the heaviest power-tailed part, +inf if none
  double tail_index() const;

  double sample(Stream& s) const;
  // inverse transform from a ccdf level u in (0,1); not defined for mixtures
  double from_uniform(double u) const;

  // law of s * X
  HeavyTailRV scaled(double s) const;

  std::string describe() const;
  KvDoc to_kv() const;
  static HeavyTailRV from_kv(const KvDoc& doc);

 private:
  HeavyTailRV(Family f, double a, double b) : family_(f), a_(a), b_(b) {}

  Family family_;
  double a_ = 0.0;  // x_m | rate | value
  double b_ = 0.0;  // nu
  std::vector<double> weights_;
  std::vector<HeavyTailRV> components_;
  std::vector<double> cumw_;
};

TailConstant tail_constant(const HeavyTailRV& rv);

// Equilibrium excess (residual lifetime) law of a finite-mean base.
class ResidualRV {
 public:
  explicit ResidualRV(HeavyTailRV base);

  const HeavyTailRV& base() const { return base_; }
  double mean_base() const { return mean_base_; }

  double ccdf(double x) const;
  double cdf(double x) const { return 1.0 - ccdf(x); }
  double mean() const;
  double sample(Stream& s) const;
  // inverse transform from a ccdf level; not defined for mixtures
  double from_uniform(double u) const;

 private:
  HeavyTailRV base_;
  double mean_base_;
  std::vector<ResidualRV> parts_;
  std::vector<double> cumw_;
  std::vector<double> partw_;
};

ResidualRV residual(const HeavyTailRV& rv);

struct LstOptions {
  double tolerance = 1e-10;
  int max_depth = 15;
};

// E[exp(-omega X)] via quadrature of the ccdf
double lst_numeric(const HeavyTailRV& rv, double omega, const LstOptions& opt = {});
double lst_numeric(const ResidualRV& rv, double omega, const LstOptions& opt = {});

// Positive stable law with E[exp(-w S)] = exp(-w^alpha), alpha in (0,1).
double sample_positive_stable(double alpha, Stream& s);
double positive_stable_from_uniforms(double alpha, double u, double e);

}  // namespace htq
