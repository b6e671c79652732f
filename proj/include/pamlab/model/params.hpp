#pragma once

#include <string>

#include "pamlab/core/types.hpp"

namespace pamlab::model {

/// (d, alpha, theta, C0) plus the core radius of the single-site profile.
struct ModelParams {
  int dim = 1;
  double alpha = 4.0;
  double theta = 1.0;
  double c0 = 1.0;
  double core_radius = 1.0;

  /// Throws InvalidArgument unless 1 <= dim <= 3, alpha > dim, theta > 0,
  /// c0 != 0 and core_radius > 0.
  void validate() const;

  bool attractive() const { return c0 < 0.0; }
};

/// u(x) = C0 * max(|x|, r0)^(-alpha).
class SingleSitePotential {
 public:
  explicit SingleSitePotential(const ModelParams& params);

  double radial(double dist) const {
    const double r = dist > core_ ? dist : core_;
    return c0_ * inverse_power(r);
  }

  double operator()(const Point& z) const { return radial(norm(z, dim_)); }

  /// Bound on |u|, attained on the core ball.
  double sup_abs() const { return std::abs(c0_) * inverse_power(core_); }

  /// u(0) = C0 r0^-alpha; the infimum when C0 < 0.
  double at_origin() const { return c0_ * inverse_power(core_); }

  int dim() const { return dim_; }
  double c0() const { return c0_; }
  double alpha() const { return alpha_; }
  double core_radius() const { return core_; }

 private:
  double inverse_power(double r) const {
    if (int_alpha_ > 0) {
      const double inv = 1.0 / r;
      double p = inv;
      for (int i = 1; i < int_alpha_; ++i) p *= inv;
      return p;
    }
    return std::pow(r, -alpha_);
  }

  int dim_;
  double c0_;
  double alpha_;
  double core_;
  int int_alpha_ = 0;
};

/// Asymptotic regimes distinguished by the moment asymptotics.
enum class Regime {
  HeavyTail,       // d < alpha < d + 2
  OneDimCritical,  // d = 1, alpha = 3
  OneDimLight,     // d = 1, alpha > 3
  TwoDimLog,       // d = 2, alpha > 4
  Critical,        // d >= 3 and alpha >= d + 2, or (d, alpha) = (2, 4)
  NegativeU,       // C0 < 0
};

Regime classify_regime(const ModelParams& params);

std::string to_string(Regime regime);

/// True when |a - b| is below a fixed relative tolerance; used to detect the
/// boundary exponents alpha = d + 2.
bool nearly_equal(double a, double b);

}  // namespace pamlab::model
