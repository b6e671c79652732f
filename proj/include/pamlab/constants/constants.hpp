#pragma once

#include <optional>
#include <string>

#include "pamlab/model/params.hpp"

namespace pamlab::constants {

/// mu = 2 (alpha - 2) / (d (alpha - d)).
double mu_exponent(int dim, double alpha);

/// g(rho) = inf_{s >= 0} C0 (rho + s)^-alpha + s^theta, the radial infimand.
double heavy_tail_infimand(double rho, double alpha, double theta, double c0);

struct HeavyTailConstant {
  double value = 0.0;
  double error_bound = 0.0;  // quadrature estimate plus certified tail error
  double cutoff = 0.0;       // P; [P, inf) handled analytically
  int evaluations = 0;
};

/// c(d, alpha, theta, C0) = int_{R^d} inf_y (C0 |q + y|^-alpha + |y|^theta) dq
/// by radial reduction.  Throws NonConvergence when the quadrature misses tol.
HeavyTailConstant c_heavy_tail_detail(int dim, double alpha, double theta, double c0, double tol = 1e-8);
inline double c_heavy_tail(int dim, double alpha, double theta, double c0, double tol = 1e-8) {
  return c_heavy_tail_detail(dim, alpha, theta, c0, tol).value;
}

/// c_-(d, theta, K) = 2 pi^(d/2) theta |K|^(1 + d/theta) / (d (d + theta) Gamma(d/2)).
double c_negative(int dim, double theta, double K);

/// (3 + theta)/(1 + theta) (pi^2/8)^((1 + theta)/(3 + theta)).
double one_dim_constant(double theta);

struct Prediction {
  model::Regime regime = model::Regime::HeavyTail;
  double exponent = 0.0;  // power of t
  double rate = 0.0;      // log E[v^p] ~ rate t^exponent; NaN when order_only
  bool order_only = false;
  bool log_correction = false;  // extra (log t)^(-theta/(4+theta)) factor
  double value = 0.0;           // rate t^exponent (NaN when order_only)
};

/// Leading behaviour of log E[v^p] at time t.
Prediction predicted_log_moment(const model::ModelParams& params, double t, double p);

struct Gap {
  double value = 0.0;  // log of E[v^p2]^(1/p2) / E[v^p1]^(1/p1)
  double lower = 0.0;
  double upper = 0.0;
  bool two_sided = false;  // only bounds are available
};

/// Predicted log intermittency ratio.  In the regimes where only two-sided
/// bounds exist the caller supplies the constants c1 >= c2 > 0.
Gap intermittency_gap(const model::ModelParams& params, double t, double p1, double p2,
                      std::optional<double> c1 = std::nullopt, std::optional<double> c2 = std::nullopt);

}  // namespace pamlab::constants
