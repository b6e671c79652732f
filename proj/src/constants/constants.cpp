#include "pamlab/constants/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pamlab/core/error.hpp"
#include "pamlab/numerics/optimize.hpp"
#include "pamlab/numerics/quadrature.hpp"

namespace pamlab::constants {
namespace {

constexpr double kPi = std::numbers::pi;

double sphere_area(int d) { return d == 1 ? 2.0 : (d == 2 ? 2.0 * kPi : 4.0 * kPi); }

// Bound on C0 rho^-alpha - g(rho), zero when the infimum sits at s = 0.
double infimand_deficit(double rho, double alpha, double theta, double c0) {
  const double a = c0 * alpha * std::pow(rho, -alpha - 1.0);
  if (theta > 1.0) return (theta - 1.0) * std::pow(a / theta, theta / (theta - 1.0));
  if (theta == 1.0) return a <= 1.0 ? 0.0 : HUGE_VAL;
  const double smax = std::pow(c0 * std::pow(rho, -alpha), 1.0 / theta);
  return smax <= std::pow(a, -1.0 / (1.0 - theta)) ? 0.0 : HUGE_VAL;
}

// Certified bound on S_d int_P^inf rho^(d-1) (C0 rho^-alpha - g(rho)) drho.
double tail_deficit(int d, double alpha, double theta, double c0, double P) {
  if (!(infimand_deficit(P, alpha, theta, c0) < HUGE_VAL)) return HUGE_VAL;
  if (theta <= 1.0) return 0.0;
  const double k = (alpha + 1.0) * theta / (theta - 1.0);
  const double coef = (theta - 1.0) * std::pow(theta, -theta / (theta - 1.0)) * std::pow(c0 * alpha, theta / (theta - 1.0));
  return sphere_area(d) * coef * std::pow(P, d - k) / (k - d);
}

}  // namespace

double mu_exponent(int d, double alpha) {
  require(d >= 1, "mu_exponent: dimension must be positive");
  require(alpha != double(d), "mu_exponent: alpha = d");
  return 2.0 * (alpha - 2.0) / (double(d) * (alpha - double(d)));
}

double heavy_tail_infimand(double rho, double alpha, double theta, double c0) {
  require(c0 > 0.0, "heavy_tail_infimand: requires C0 > 0");
  auto f = [&](double s) { return c0 * std::pow(rho + s, -alpha) + std::pow(s, theta); };
  // Beyond s_max the displacement cost alone exceeds the s = 0 value; any
  // interior minimiser also lies below s_0 = 4 max(1, alpha C0/theta)^(1/(alpha+theta)).
  const double at0 = rho > 0.0 ? c0 * std::pow(rho, -alpha) : HUGE_VAL;
  const double s0 = 4.0 * std::pow(std::max(1.0, alpha * c0 / theta), 1.0 / (alpha + theta));
  const double hi = rho > 0.0 ? std::min(std::pow(at0, 1.0 / theta), s0 + rho) : s0;
  const double lo = 1e-14 * hi;
  const auto m = numerics::scan_then_refine(f, lo, hi, 512, true, 1e-12);
  return std::min(at0, m.value);
}

HeavyTailConstant c_heavy_tail_detail(int d, double alpha, double theta, double c0, double tol) {
  require(d >= 1 && d <= 3, "c_heavy_tail: dimension must be 1..3");
  require(alpha > d, "c_heavy_tail: requires alpha > d");
  require(theta > 0.0, "c_heavy_tail: requires theta > 0");
  require(c0 > 0.0, "c_heavy_tail: requires C0 > 0");
  require(tol > 0.0, "c_heavy_tail: tol must be positive");

  HeavyTailConstant out;
  double P = 1.0;
  while (tail_deficit(d, alpha, theta, c0, P) > 0.5 * tol) {
    P *= 2.0;
    if (P > 1e12) throw NonConvergence("c_heavy_tail: no certified tail cutoff");
  }
  out.cutoff = P;
  const double sd = sphere_area(d);
  auto integrand = [&](double rho) {
    return sd * std::pow(rho, d - 1) * heavy_tail_infimand(rho, alpha, theta, c0);
  };
  // Geometric segments [0, 2^-8], [2^-8, 2^-7], ..., [P/2, P].
  std::vector<double> knots{0.0};
  for (double x = 1.0 / 256.0; x < P; x *= 2.0) knots.push_back(x);
  knots.push_back(P);
  const double seg_tol = 0.5 * tol / double(knots.size() - 1);
  double sum = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const auto I = numerics::adaptive_simpson(integrand, knots[i], knots[i + 1], seg_tol);
    if (!I.converged) throw NonConvergence("c_heavy_tail: quadrature did not reach tolerance");
    sum += I.value;
    err += I.error_estimate;
    out.evaluations += I.evaluations;
  }
  const double tail = sd * c0 * std::pow(P, d - alpha) / (alpha - d);
  out.value = sum + tail;
  out.error_bound = err + tail_deficit(d, alpha, theta, c0, P);
  return out;
}

double c_negative(int d, double theta, double K) {
  require(d >= 1, "c_negative: dimension must be positive");
  require(theta > 0.0, "c_negative: requires theta > 0");
  const double dd = d;
  return 2.0 * std::pow(kPi, dd / 2.0) * theta * std::pow(std::abs(K), 1.0 + dd / theta) /
         (dd * (dd + theta) * std::tgamma(dd / 2.0));
}

double one_dim_constant(double theta) {
  require(theta > 0.0, "one_dim_constant: requires theta > 0");
  return (3.0 + theta) / (1.0 + theta) * std::pow(kPi * kPi / 8.0, (1.0 + theta) / (3.0 + theta));
}

Prediction predicted_log_moment(const model::ModelParams& mp, double t, double p) {
  require(p >= 1.0, "predicted_log_moment: requires p >= 1");
  require(t > 0.0, "predicted_log_moment: requires t > 0");
  Prediction out;
  out.regime = model::classify_regime(mp);
  const double d = mp.dim, a = mp.alpha, th = mp.theta;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  switch (out.regime) {
    case model::Regime::HeavyTail:
      out.exponent = (d + th) / (a + th);
      out.rate = -std::pow(p, out.exponent) * c_heavy_tail(mp.dim, a, th, mp.c0);
      break;
    case model::Regime::OneDimLight:
      out.exponent = (1.0 + th) / (3.0 + th);
      out.rate = -(3.0 + th) / (1.0 + th) * std::pow(p * kPi * kPi / 8.0, out.exponent);
      break;
    case model::Regime::NegativeU: {
      out.exponent = 1.0 + d / th;
      const model::SingleSitePotential u(mp);
      out.rate = c_negative(mp.dim, th, p * u.at_origin());
      break;
    }
    case model::Regime::OneDimCritical:
      out.exponent = (1.0 + th) / (3.0 + th);
      out.order_only = true;
      break;
    case model::Regime::TwoDimLog:
      out.exponent = (2.0 + th) / (4.0 + th);
      out.order_only = true;
      out.log_correction = true;
      break;
    case model::Regime::Critical: {
      const double mu = model::nearly_equal(a, d + 2.0) ? 1.0 : mu_exponent(mp.dim, a);
      out.exponent = (d + th * mu) / (d + 2.0 + th * mu);
      out.order_only = true;
      break;
    }
  }
  if (out.order_only) {
    out.rate = nan;
    out.value = nan;
  } else {
    out.value = out.rate * std::pow(t, out.exponent);
  }
  return out;
}

Gap intermittency_gap(const model::ModelParams& mp, double t, double p1, double p2, std::optional<double> c1,
                      std::optional<double> c2) {
  require(p1 >= 1.0 && p2 >= p1, "intermittency_gap: requires 1 <= p1 <= p2");
  require(t > 0.0, "intermittency_gap: requires t > 0");
  Gap g;
  const auto regime = model::classify_regime(mp);
  const double d = mp.dim, a = mp.alpha, th = mp.theta;
  switch (regime) {
    case model::Regime::HeavyTail: {
      const double e = (d - a) / (a + th);
      g.value = c_heavy_tail(mp.dim, a, th, mp.c0) * std::pow(t, (d + th) / (a + th)) * (std::pow(p1, e) - std::pow(p2, e));
      break;
    }
    case model::Regime::OneDimLight: {
      const double e = -2.0 / (3.0 + th);
      g.value = (3.0 + th) / (1.0 + th) * std::pow(kPi * kPi * t / 8.0, (1.0 + th) / (3.0 + th)) *
                (std::pow(p1, e) - std::pow(p2, e));
      break;
    }
    case model::Regime::NegativeU: {
      const model::SingleSitePotential u(mp);
      g.value = c_negative(mp.dim, th, u.at_origin()) * std::pow(t, 1.0 + d / th) *
                (std::pow(p2, d / th) - std::pow(p1, d / th));
      break;
    }
    default: {
      if (!c1 || !c2) throw InvalidArgument("intermittency_gap: this regime only has bounds; supply c1 >= c2 > 0");
      require(*c1 >= *c2 && *c2 > 0.0, "intermittency_gap: requires c1 >= c2 > 0");
      double mu = 1.0, r;
      if (regime == model::Regime::OneDimCritical) {
        r = std::pow(t, 1.0 / (3.0 + th));
      } else if (regime == model::Regime::TwoDimLog) {
        require(t > 1.0, "intermittency_gap: requires t > 1");
        r = std::pow(t, 1.0 / (4.0 + th)) * std::pow(std::log(t), th / (8.0 + 2.0 * th));
      } else {
        mu = model::nearly_equal(a, d + 2.0) ? 1.0 : mu_exponent(mp.dim, a);
        r = std::pow(t, 1.0 / (d + 2.0 + mu * th));
      }
      const double e = -2.0 / (d + 2.0 + mu * th);
      const double scale = t / (r * r);
      g.two_sided = true;
      g.lower = scale * (*c2 * std::pow(p1, e) - *c1 * std::pow(p2, e));
      g.upper = scale * (*c1 * std::pow(p1, e) - *c2 * std::pow(p2, e));
      g.value = std::numeric_limits<double>::quiet_NaN();
      return g;
    }
  }
  g.lower = g.upper = g.value;
  return g;
}

}  // namespace pamlab::constants
