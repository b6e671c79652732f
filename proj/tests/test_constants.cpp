#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>

#include "pamlab/acceptance/acceptance.hpp"
#include "pamlab/constants/constants.hpp"
#include "pamlab/core/error.hpp"

using namespace pamlab;
using namespace pamlab::constants;

namespace {

constexpr double kPi = std::numbers::pi;

// inf_{s >= 0} C0 (rho + s)^-alpha + s^theta by Brent on a bracket that
// always contains the minimiser.
double infimand_oracle(double rho, double alpha, double theta, double c0) {
  auto f = [&](double s) { return c0 * std::pow(rho + s, -alpha) + std::pow(s, theta); };
  const double hi = std::max(1.0, 2.0 * std::pow(c0, 1.0 / theta)) + 1.0;
  auto r = boost::math::tools::brent_find_minima(f, 0.0, hi, 52);
  return std::min(r.second, f(0.0));
}

double sphere_area(int d) { return 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0); }

// c(d, alpha, theta, C0) = S_d int_0^inf rho^(d-1) g(rho) drho.
double heavy_tail_oracle(int d, double alpha, double theta, double c0) {
  auto g = [&](double rho) { return std::pow(rho, d - 1) * infimand_oracle(rho, alpha, theta, c0); };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  return sphere_area(d) * (ts.integrate(g, 1e-300, 1.0) + es.integrate(g, 1.0, INFINITY));
}

}  // namespace

TEST_SUITE("constants") {
  TEST_CASE("mu exponent") {
    CHECK(mu_exponent(3, 5.0) == doctest::Approx(2.0 * 3.0 / (3.0 * 2.0)));
    CHECK(mu_exponent(3, 7.0) == doctest::Approx(10.0 / 12.0));
    CHECK(mu_exponent(2, 4.0) == doctest::Approx(1.0));
  }

  TEST_CASE("infimand matches a Brent minimisation") {
    for (double rho : {0.05, 0.5, 1.0, 3.0, 20.0})
      CHECK(heavy_tail_infimand(rho, 2.5, 1.3, 0.8) == doctest::Approx(infimand_oracle(rho, 2.5, 1.3, 0.8)).epsilon(1e-9));
  }

  TEST_CASE("heavy-tail constant in closed form") {
    // d = 1, alpha = 2, theta = 1: g(rho) = 3 (2 C0)^(1/3) / 2 - rho on
    // rho <= (2 C0)^(1/3), C0 rho^-2 beyond; the integral is 3 (2 C0)^(2/3).
    for (double c0 : {1.0, 0.3, 4.0})
      CHECK(c_heavy_tail(1, 2.0, 1.0, c0) == doctest::Approx(3.0 * std::pow(2.0 * c0, 2.0 / 3.0)).epsilon(1e-8));
  }

  TEST_CASE("heavy-tail constant against independent quadrature") {
    struct Case {
      int d;
      double alpha, theta, c0;
    };
    for (auto c : {Case{1, 2.5, 1.0, 1.0}, Case{2, 3.0, 2.0, 1.0}, Case{3, 4.5, 0.7, 2.0}}) {
      const auto r = c_heavy_tail_detail(c.d, c.alpha, c.theta, c.c0, 1e-9);
      CHECK(r.value == doctest::Approx(heavy_tail_oracle(c.d, c.alpha, c.theta, c.c0)).epsilon(1e-7));
      CHECK(r.error_bound <= 1e-9 * std::max(1.0, r.value));
    }
  }

  TEST_CASE("c_minus is the volume integral of (|K| - |x|^theta)_+") {
    // d = 1: 2 |K|^(1 + 1/theta) theta / (1 + theta);  d = 2, theta = 2: pi K^2 / 2.
    CHECK(c_negative(1, 1.0, -1.0) == doctest::Approx(1.0));
    CHECK(c_negative(1, 2.0, -3.0) == doctest::Approx(2.0 * std::pow(3.0, 1.5) * 2.0 / 3.0));
    CHECK(c_negative(2, 2.0, -2.0) == doctest::Approx(kPi * 4.0 / 2.0));
    auto f = [](double rho) { return std::max(0.0, 1.5 - std::pow(rho, 0.8)) * sphere_area(3) * rho * rho; };
    boost::math::quadrature::tanh_sinh<double> ts;
    CHECK(c_negative(3, 0.8, -1.5) == doctest::Approx(ts.integrate(f, 0.0, std::pow(1.5, 1.25))).epsilon(1e-9));
  }

  TEST_CASE("one-dimensional constant is the minimum of the profile") {
    for (double th : {0.5, 1.0, 2.0, 3.5}) {
      auto f = [&](double l) { return kPi * kPi / (2 * l * l) + std::pow(l, 1 + th) / (std::pow(2.0, th) * (1 + th)); };
      const auto m = boost::math::tools::brent_find_minima(f, 1e-3, 100.0, 52);
      CHECK(one_dim_constant(th) == doctest::Approx(m.second).epsilon(1e-10));
    }
    CHECK(one_dim_constant(1.0) == doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-14));
  }

  TEST_CASE("prediction exponents by regime") {
    model::ModelParams p;
    p.alpha = 2.5;
    p.theta = 1.0;
    auto r = predicted_log_moment(p, 100.0, 2.0);
    CHECK(r.regime == model::Regime::HeavyTail);
    CHECK(r.exponent == doctest::Approx(2.0 / 3.5));
    CHECK(r.value == doctest::Approx(r.rate * std::pow(100.0, r.exponent)));
    CHECK(r.value < 0.0);
    p.alpha = 3.0;
    r = predicted_log_moment(p, 100.0, 1.0);
    CHECK(r.order_only);
    CHECK(std::isnan(r.value));
    p.dim = 2;
    p.alpha = 6.0;
    r = predicted_log_moment(p, 100.0, 1.0);
    CHECK(r.log_correction);
    CHECK(r.exponent == doctest::Approx(3.0 / 5.0));
    p.c0 = -1.0;
    r = predicted_log_moment(p, 10.0, 1.0);
    CHECK(r.regime == model::Regime::NegativeU);
    CHECK(r.value > 0.0);
    CHECK_THROWS_AS(predicted_log_moment(p, 10.0, 0.5), InvalidArgument);
  }

  TEST_CASE("heavy-tail gap is the difference of normalised moments") {
    model::ModelParams p;
    p.alpha = 2.5;
    const double t = 50.0;
    const auto a = predicted_log_moment(p, t, 1.0);
    const auto b = predicted_log_moment(p, t, 3.0);
    const auto g = intermittency_gap(p, t, 1.0, 3.0);
    CHECK(g.value == doctest::Approx(b.value / 3.0 - a.value).epsilon(1e-10));
    CHECK(g.value > 0.0);
  }

  TEST_CASE("the acceptance check rejects a perturbed constant") {
    acceptance::AcceptanceOptions ok;
    ok.only = {"A3"};
    CHECK(acceptance::run_criterion("A3", ok).pass);
    acceptance::AcceptanceOptions bad = ok;
    bad.one_dim_constant = [](double th) { return 1.001 * one_dim_constant(th); };
    CHECK_FALSE(acceptance::run_criterion("A3", bad).pass);
  }
}
