#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pamlab/core/error.hpp"
#include "pamlab/core/rng.hpp"
#include "pamlab/model/displacement.hpp"
#include "pamlab/model/params.hpp"
#include "pamlab/model/potential.hpp"

using namespace pamlab;
using namespace pamlab::model;

namespace {

double theta_series(double theta, int n) {
  double s = 1.0;
  for (int k = 1; k <= n; ++k) s += 2.0 * std::exp(-std::pow(double(k), theta));
  return s;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("parameter validation") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    p.alpha = 1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.dim = 4;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.c0 = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.theta = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
  }

  TEST_CASE("regime table") {
    auto regime = [](int d, double a, double c0 = 1.0) {
      ModelParams p;
      p.dim = d;
      p.alpha = a;
      p.c0 = c0;
      return classify_regime(p);
    };
    CHECK(regime(1, 2.5) == Regime::HeavyTail);
    CHECK(regime(1, 3.0) == Regime::OneDimCritical);
    CHECK(regime(1, 4.0) == Regime::OneDimLight);
    CHECK(regime(2, 3.0) == Regime::HeavyTail);
    CHECK(regime(2, 4.0) == Regime::Critical);
    CHECK(regime(2, 5.0) == Regime::TwoDimLog);
    CHECK(regime(3, 4.0) == Regime::HeavyTail);
    CHECK(regime(3, 5.0) == Regime::Critical);
    CHECK(regime(3, 7.0) == Regime::Critical);
    CHECK(regime(2, 5.0, -1.0) == Regime::NegativeU);
  }

  TEST_CASE("single-site potential") {
    ModelParams p;
    p.alpha = 3.0;
    p.c0 = 2.0;
    p.core_radius = 0.5;
    const SingleSitePotential u(p);
    CHECK(u({2.0, 0, 0}) == doctest::Approx(2.0 / 8.0));
    CHECK(u({0.1, 0, 0}) == doctest::Approx(2.0 / 0.125));
    CHECK(u.sup_abs() == doctest::Approx(16.0));
    p.alpha = 2.5;
    const SingleSitePotential v(p);
    CHECK(v({3.0, 0, 0}) == doctest::Approx(2.0 * std::pow(3.0, -2.5)));
  }

  TEST_CASE("normalizing constant against closed forms") {
    // theta = 1, d = 1: geometric series (e + 1)/(e - 1).
    const double e = std::exp(1.0);
    CHECK(normalizing_constant(1, 1.0) == doctest::Approx((e + 1.0) / (e - 1.0)).epsilon(1e-12));
    // theta = 2 factorizes over axes.
    const double z1 = theta_series(2.0, 40);
    CHECK(normalizing_constant(1, 2.0) == doctest::Approx(z1).epsilon(1e-12));
    CHECK(normalizing_constant(2, 2.0) == doctest::Approx(z1 * z1).epsilon(1e-11));
    CHECK(normalizing_constant(3, 2.0) == doctest::Approx(z1 * z1 * z1).epsilon(1e-11));
    const auto nc = normalizing_constant_detail(1, 0.5);
    CHECK(nc.tail_bound <= 1e-12);
    CHECK(nc.value == doctest::Approx(theta_series(0.5, 20000)).epsilon(1e-9));
  }

  TEST_CASE("displacement law sampling frequencies") {
    const DisplacementLaw law(1, 1.0);
    Rng rng = derive_stream(7, 0);
    const int n = 200000;
    int zeros = 0, ones = 0;
    for (int i = 0; i < n; ++i) {
      const Site s = law.sample(rng);
      zeros += s[0] == 0;
      ones += s[0] == 1;
    }
    for (auto [count, site] : {std::pair{zeros, Site{0, 0, 0}}, std::pair{ones, Site{1, 0, 0}}}) {
      const double q = law.mass(site);
      const double se = std::sqrt(q * (1 - q) / n);
      CHECK(std::abs(double(count) / n - q) < 5.0 * se);
    }
  }

  TEST_CASE("configuration log weight and cost") {
    auto cfg = DisplacementConfig::zeros(LatticeBox::cube(2, -1, 1));
    cfg.set({0, 0, 0}, {3, 4, 0});
    cfg.set({1, 1, 0}, {0, -2, 0});
    CHECK(displacement_cost(cfg, 1.0) == doctest::Approx(7.0));
    CHECK(displacement_cost(cfg, 2.0) == doctest::Approx(29.0));
    const double lz = std::log(normalizing_constant(2, 1.0));
    CHECK(displacement_log_weight(cfg, 1.0, lz) == doctest::Approx(-7.0 - 9.0 * lz));
    cfg.erase({1, 1, 0});
    CHECK(cfg.size() == 8);
    CHECK_FALSE(cfg.covers(LatticeBox::cube(2, -1, 1)));
  }

  TEST_CASE("configuration text round trip") {
    const DisplacementLaw law(2, 0.7);
    Rng rng = derive_stream(3, 1);
    auto cfg = sample_config(law, LatticeBox::cube(2, -3, 3), rng);
    cfg.erase({0, 1, 0});
    std::stringstream ss;
    write_config(ss, cfg);
    const auto back = read_config(ss, 2);
    CHECK(back == cfg);
  }

  TEST_CASE("truncated potential against a direct lattice sum") {
    ModelParams p;
    p.dim = 2;
    p.alpha = 3.5;
    const SingleSitePotential u(p);
    const DisplacementLaw law(2, 1.0);
    Rng rng = derive_stream(5, 2);
    const auto cfg = sample_config(law, LatticeBox::cube(2, -12, 12), rng);
    const Point x{0.3, -0.7, 0.0};
    const double R = 6.0;
    double direct = 0.0;
    cfg.for_each([&](const Site& q, const Site& xi) {
      const Point dq{x[0] - q[0], x[1] - q[1], 0.0};
      if (norm(dq, 2) <= R) direct += u(x - to_point(q) - to_point(xi));
    });
    const auto pv = potential_value(u, cfg, x, R);
    CHECK(pv.value == doctest::Approx(direct).epsilon(1e-13));
    const LatticePotential field(u, cfg, R);
    CHECK(field(x) == doctest::Approx(direct).epsilon(1e-13));
    CHECK_THROWS_AS(potential_value(u, cfg, Point{10.0, 0.0, 0.0}, R), CoverageError);
  }

  TEST_CASE("default truncation radius meets its tail bound") {
    ModelParams p;
    p.dim = 2;
    p.alpha = 5.0;
    const SingleSitePotential u(p);
    const double R = default_trunc_radius(u, 1e-6);
    CHECK(R >= 2.0 * p.core_radius);
    CHECK(potential_tail_bound(u, R) <= 1e-6 * std::abs(p.c0) * (1 + 1e-9));
  }

  TEST_CASE("point cloud potential equals the untruncated sum") {
    ModelParams p;
    p.alpha = 4.0;
    const SingleSitePotential u(p);
    const std::vector<Point> centres{{0.5, 0, 0}, {-2.0, 0, 0}, {7.25, 0, 0}};
    const double s = 3.0;
    const PointCloudPotential field(u, centres, s);
    const Point x{0.4, 0, 0};
    double direct = 0.0;
    for (const auto& c : centres) direct += s * s * u(s * x - c);
    CHECK(field(x) == doctest::Approx(direct).epsilon(1e-13));
  }

  TEST_CASE("tabulated potential is exact on affine fields") {
    struct Affine : PotentialField {
      int dim() const override { return 2; }
      double operator()(const Point& x) const override { return 1.0 + 2.0 * x[0] - 0.5 * x[1]; }
      bool covers(const Point&) const override { return true; }
    } f;
    const TabulatedPotential tab(f, {-1, -1, 0}, {1, 1, 0}, 0.1);
    CHECK(tab({0.123, -0.456, 0}) == doctest::Approx(f({0.123, -0.456, 0})).epsilon(1e-12));
    CHECK_FALSE(tab.covers({1.5, 0, 0}));
  }
}
