#pragma once

#include <memory>
#include <stdexcept>

#include "htq/rng.hpp"

namespace htq {

class MlfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mittag-Leffler function on the negative axis and the Mittag-Leffler
// distribution with LST 1/(1 + w^alpha). Coefficient tables are built once per
// instance; instances are immutable and safe to share across threads.
class MittagLeffler {
 public:
  explicit MittagLeffler(double alpha);

  double alpha() const { return alpha_; }

  // E_alpha(z) for z <= 0
  double function(double z) const;
  double cdf(double x) const;
  double ccdf(double x) const;
  double sample(Stream& s) const;

  // evaluation regime boundaries in x = |z|^(1/alpha)
  static constexpr double kDoubleSeriesMax = 8.0;
  static constexpr double kQuadSeriesMax = 26.0;

 private:
  struct Tables;
  double series_double(double t) const;
  double series_quad(double t) const;
  double asymptotic(double t, double x) const;

  double alpha_;
  std::shared_ptr<const Tables> tables_;
};

double ml_function(double alpha, double z);
double ml_cdf(double alpha, double x);
double ml_ccdf(double alpha, double x);
double ml_sample(double alpha, Stream& s);

}  // namespace htq
