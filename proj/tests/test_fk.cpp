#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pamlab/core/error.hpp"
#include "pamlab/fk/fk.hpp"

using namespace pamlab;
using namespace pamlab::fk;

namespace {

// V(x) = omega^2 |x|^2 / 2; E exp(-int V(B)) from the origin is
// cosh(omega t)^(-d/2).
struct Harmonic final : model::PotentialField {
  int d;
  double omega;
  Harmonic(int dim, double w) : d(dim), omega(w) {}
  int dim() const override { return d; }
  double operator()(const Point& x) const override {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += x[i] * x[i];
    return 0.5 * omega * omega * s;
  }
  bool covers(const Point&) const override { return true; }
};

struct Slab final : model::PotentialField {
  int dim() const override { return 1; }
  double operator()(const Point& x) const override {
    if (!covers(x)) throw CoverageError("outside the slab");
    return 0.0;
  }
  bool covers(const Point& x) const override { return std::abs(x[0]) < 0.05; }
};

model::ModelParams light() {
  model::ModelParams p;
  p.alpha = 4.0;
  return p;
}

PathEstimator small(double t, std::size_t paths = 128) {
  PathEstimator e;
  e.t = t;
  e.dt = t / 64;
  e.n_paths = paths;
  e.start = StartMode::Uniform;
  return e;
}

}  // namespace

TEST_SUITE("fk") {
  TEST_CASE("constant potential is exact") {
    const model::ConstantPotential V(2, 0.5);
    PathEstimator e;
    e.dim = 2;
    e.t = 2.0;
    e.n_paths = 100;
    const auto m = quenched_mass(V, e, 1);
    CHECK(m.estimate == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(m.std_err < 1e-12);
    CHECK(m.steps == 1024);
  }

  TEST_CASE("harmonic potential matches the Cameron-Martin formula") {
    for (int d : {1, 2}) {
      const Harmonic V(d, 1.0);
      PathEstimator e;
      e.dim = d;
      e.t = 1.0;
      e.n_paths = 20000;
      e.integrator = Integrator::Trapezoid;
      const auto m = quenched_mass(V, e, 17);
      const double exact = std::pow(std::cosh(1.0), -0.5 * d);
      CHECK(std::abs(m.estimate - exact) < 4.0 * m.std_err + 1e-3);
    }
  }

  TEST_CASE("parallel and serial estimates are identical") {
    const Harmonic V(2, 0.8);
    PathEstimator e;
    e.dim = 2;
    e.t = 1.0;
    e.n_paths = 1000;  // several blocks plus a partial block
    const auto a = quenched_mass(V, e, 3, 5);
    const auto b = quenched_mass_serial(V, e, 3, 5);
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_err == b.std_err);
    CHECK(quenched_mass(V, e, 3, 6).estimate != a.estimate);
  }

  TEST_CASE("leaving the field raises a coverage error") {
    PathEstimator e;
    e.t = 1.0;
    e.n_paths = 64;
    CHECK_THROWS_AS(quenched_mass(Slab{}, e, 1), CoverageError);
    CHECK_THROWS_AS(quenched_mass_serial(Slab{}, e, 1), CoverageError);
  }

  TEST_CASE("estimator validation") {
    PathEstimator e;
    e.t = 1.0;
    e.dt = 0.3;
    CHECK_THROWS_AS(e.validate(), InvalidArgument);
    e.dt = 0.25;
    CHECK_NOTHROW(e.validate());
    CHECK(e.steps() == 4);
    e.n_paths = 0;
    CHECK_THROWS_AS(e.validate(), InvalidArgument);
  }

  TEST_CASE("configuration mass needs a covering environment") {
    const auto p = light();
    const auto e = small(1.0);
    const auto cfg = sample_environment(p, e, 4, 0);
    CHECK(cfg.covers(environment_box(p, e, model::default_trunc_radius(model::SingleSitePotential(p)))));
    auto fixed = e;
    fixed.start = StartMode::Fixed;
    const auto m = quenched_mass(cfg, p, fixed, 4);
    CHECK(m.estimate > 0.0);
    CHECK(m.estimate < 1.0);
    const auto tiny = model::DisplacementConfig::zeros(LatticeBox::cube(1, -1, 1));
    CHECK_THROWS_AS(quenched_mass(tiny, p, fixed, 4), CoverageError);
  }

  TEST_CASE("common random numbers order the normalised moments") {
    const auto s = annealed_sample(light(), {1.0, 2.0, 3.0}, 20, small(2.0), 5);
    REQUIRE(s.moments.size() == 3);
    double prev = 0.0;
    for (const auto& m : s.moments) {
      const double norm = std::pow(m.mean, 1.0 / m.p);
      CHECK(norm >= prev);
      prev = norm;
      CHECK(m.n_env == 20);
    }
    const auto one = annealed_moment(light(), 2.0, 20, small(2.0), 5);
    CHECK(one.mean == doctest::Approx(s.moments[1].mean).epsilon(1e-14));
  }

  TEST_CASE("equal orders give ratio one") {
    const auto r = intermittency_ratio(light(), 2.0, 2.0, 10, small(1.0), 3, 200);
    CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("a deterministic environment is degenerate") {
    FkOptions o;
    o.zero_displacements = true;
    o.shared_paths = true;
    auto e = small(1.0);
    e.start = StartMode::Fixed;
    const auto r = intermittency_ratio(light(), 1.0, 3.0, 12, e, 8, 200, 0.95, o);
    CHECK(r.degenerate);
    CHECK(r.ratio == 1.0);
    CHECK(r.ci.lower == 1.0);
    CHECK(r.ci.upper == 1.0);
  }

  TEST_CASE("bootstrap interval brackets the ratio") {
    const auto r = intermittency_ratio(light(), 1.0, 2.0, 30, small(2.0), 6, 500);
    CHECK(r.ratio >= 1.0);
    CHECK(r.ci.lower <= r.ratio);
    CHECK(r.ratio <= r.ci.upper);
    CHECK(r.n_boot == 500);
  }

  TEST_CASE("grid start averages over start points") {
    auto e = small(1.0, 64);
    e.start = StartMode::Grid;
    e.grid_per_axis = 3;
    const auto s = annealed_sample(light(), {1.0}, 4, e, 2);
    CHECK(s.moments[0].mean > 0.0);
    CHECK(s.masses.size() == 4);
  }

  TEST_CASE("exponent fit") {
    std::vector<std::pair<double, double>> series;
    for (double t : {1.0, 2.0, 4.0, 8.0, 16.0}) series.emplace_back(t, -3.0 * std::pow(t, 0.6));
    const auto f = exponent_fit(series);
    CHECK(f.exponent == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f.points == 5);
    CHECK_THROWS_AS(exponent_fit({{1, 1}, {2, 2}, {3, 3}}), InvalidArgument);
    CHECK_THROWS_AS(exponent_fit({{1, 1}, {2, -2}, {3, 3}, {4, 4}}), InvalidArgument);
    CHECK_THROWS_AS(exponent_fit({{1, 2}, {2, 2}, {3, 2}, {4, 2}}), InvalidArgument);
    CHECK_THROWS_AS(exponent_fit({{0, 1}, {2, 2}, {3, 3}, {4, 4}}), InvalidArgument);
  }

  TEST_CASE("moment CSV rows") {
    const auto p = light();
    const auto e = small(1.0, 64);
    const auto m = annealed_moment(p, 1.0, 3, e, 1);
    std::ostringstream os;
    write_moment_csv_header(os);
    write_moment_csv_row(os, p, e, m);
    const auto text = os.str();
    CHECK(text.find("t,p,mean,std_err,n_env,n_paths,dt,seed,regime\n") != std::string::npos);
    CHECK(text.find("d1_alpha_gt3") != std::string::npos);
  }
}
