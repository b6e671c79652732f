#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pamlab/constants/constants.hpp"
#include "pamlab/core/error.hpp"
#include "pamlab/variational/variational.hpp"

using namespace pamlab;
using namespace pamlab::variational;

namespace {

model::ModelParams one_dim(double alpha, double theta = 1.0) {
  model::ModelParams p;
  p.alpha = alpha;
  p.theta = theta;
  return p;
}

}  // namespace

TEST_SUITE("variational") {
  TEST_CASE("scaling exponents") {
    const double t = 1e4;
    auto c = scaling_context(t, one_dim(4.0, 2.0));
    CHECK(std::pow(c.r, 5.0) == doctest::Approx(t));
    CHECK(c.gamma_r == 1.0);

    model::ModelParams p;
    p.dim = 2;
    p.alpha = 6.0;
    p.theta = 1.0;
    c = scaling_context(t, p);
    CHECK(c.r == doctest::Approx(std::pow(t, 0.2) * std::pow(std::log(t), 0.1)));
    CHECK(c.gamma_r == doctest::Approx(std::sqrt(5.0 * std::log(c.r))));

    p.dim = 3;
    p.alpha = 5.0;
    c = scaling_context(t, p);
    CHECK(c.mu == 1.0);
    CHECK(c.gamma_r == doctest::Approx(1.0));
    CHECK(std::pow(c.r, 6.0) == doctest::Approx(t));

    p.alpha = 7.0;
    c = scaling_context(t, p);
    CHECK(c.mu == doctest::Approx(10.0 / 12.0));
    CHECK(std::pow(c.r, 5.0 + c.mu) == doctest::Approx(t));

    CHECK_THROWS_AS(scaling_context(t, one_dim(2.5)), InvalidArgument);
    CHECK_THROWS_AS(scaling_context(2.0, one_dim(4.0)), InvalidArgument);
  }

  TEST_CASE("context_for_scale inverts r(t)") {
    const auto p = one_dim(3.0, 1.5);
    const auto c = context_for_scale(12.0, p);
    CHECK(c.r == doctest::Approx(12.0).epsilon(1e-10));
    CHECK(scaling_context(c.t, p).r == doctest::Approx(12.0).epsilon(1e-10));
    CHECK(moment_context(100.0, 2.0, p).t == doctest::Approx(200.0));
  }

  TEST_CASE("Lambda_t sites and the cost term") {
    const auto b = lambda_t_sites(2, 5.0);
    CHECK(b.lo[0] == -2);
    CHECK(b.hi[1] == 2);
    auto z = model::DisplacementConfig::zeros(lambda_t_sites(1, 10.0));
    z.set({1, 0, 0}, {3, 0, 0});
    z.set({-2, 0, 0}, {-1, 0, 0});
    ScalingContext ctx;
    ctx.r = 2.0;
    ctx.gamma_r = 1.5;
    const double th = 2.0;
    const double expected = std::pow(1.5, th) * (std::pow(1.5, th) + std::pow(0.5, th)) / 2.0;
    CHECK(cost_term(z, ctx, th) == doctest::Approx(expected));
  }

  TEST_CASE("expulsion cost by direct summation") {
    for (auto [m, n] : {std::pair{-3, 4}, std::pair{0, 1}, std::pair{-10, 7}}) {
      const double r = 3.0, th = 1.7;
      double s = 0.0;
      for (int q = m + 1; q < n; ++q) s += std::pow(std::min(q - m, n - q), th);
      CHECK(expulsion_cost(m, n, r, th) == doctest::Approx(s / std::pow(r, 1 + th)));
    }
  }

  TEST_CASE("continuum profile minimum") {
    for (double th : {0.5, 1.0, 3.0}) {
      const auto m = minimize_continuum_profile(th);
      CHECK(m.value == doctest::Approx(constants::one_dim_constant(th)).epsilon(1e-9));
      CHECK(continuum_profile(m.ell * 1.01, th) > m.value);
      CHECK(continuum_profile(m.ell * 0.99, th) > m.value);
    }
  }

  TEST_CASE("interval solution is self-consistent") {
    const auto p = one_dim(4.0);
    const auto ctx = context_for_scale(8.0, p);
    const auto s = minimize_interval_1d(ctx, p);
    CHECK(s.value == doctest::Approx(s.lambda + s.cost).epsilon(1e-12));
    CHECK(s.interval_m < s.interval_n);
    CHECK(double(s.interval_n - s.interval_m) <= 8.0 * ctx.r + 1e-9);
    // Re-evaluating the returned configuration reproduces the value.
    const auto again = functional_value(s.config, ctx, p, s.domain);
    CHECK(again.value == doctest::Approx(s.value).epsilon(1e-7));
    // Value is bounded below by the free Dirichlet eigenvalue of the interval.
    const double len = double(s.interval_n - s.interval_m) / ctx.r;
    CHECK(s.lambda >= 0.99 * std::numbers::pi * std::numbers::pi / (2 * len * len));
  }

  TEST_CASE("greedy trace strictly decreases") {
    const auto p = one_dim(4.0);
    const auto ctx = scaling_context(16.0, p);
    OptimizerOptions o;
    o.budget = 200;
    const auto s = minimize_functional(ctx, p, o);
    REQUIRE(!s.trace.empty());
    const double baseline = s.trace.front().value;
    CHECK(s.value <= baseline);
    for (std::size_t i = 1; i < s.trace.size(); ++i) {
      CHECK(s.trace[i].value < s.trace[i - 1].value);
      CHECK(s.trace[i].accepted);
    }
    CHECK(s.evaluations <= o.budget);
  }

  TEST_CASE("annealing keeps a running minimum and is seeded") {
    const auto p = one_dim(4.0);
    const auto ctx = scaling_context(16.0, p);
    OptimizerOptions o;
    o.method = Optimizer::Annealing;
    o.budget = 150;
    o.seed = 9;
    const auto s = minimize_functional(ctx, p, o);
    REQUIRE(!s.trace.empty());
    double best = HUGE_VAL;
    for (const auto& e : s.trace) {
      best = std::min(best, e.value);
      CHECK(e.best == doctest::Approx(best));
    }
    CHECK(s.value <= s.trace.front().value + 1e-12);
    const auto s2 = minimize_functional(ctx, p, o);
    CHECK(s2.value == s.value);
  }

  TEST_CASE("optimizer names") {
    CHECK(parse_optimizer("greedy") == Optimizer::Greedy);
    CHECK(parse_optimizer(to_string(Optimizer::Annealing)) == Optimizer::Annealing);
    CHECK_THROWS_AS(parse_optimizer("newton"), InvalidArgument);
  }

  TEST_CASE("form comparison at toy scale") {
    const auto p = one_dim(3.0);
    const auto ctx = scaling_context(4.0, p);
    CompareCaps caps;
    caps.max_cells = 2;
    caps.nodes_per_cell = 8;
    const auto f = compare_variational_forms(ctx, p, caps);
    CHECK(f.relevant_pairs > 0);
    CHECK(f.full_configs > 0);
    CHECK(f.ratio == doctest::Approx(f.relevant_infimum / f.full_infimum));
    CHECK(std::isfinite(f.epsilon));
  }

  TEST_CASE("solution CSV schema") {
    const auto p = one_dim(4.0);
    const auto ctx = context_for_scale(4.0, p);
    const auto s = minimize_interval_1d(ctx, p);
    std::ostringstream os;
    write_solution_csv_header(os);
    write_solution_csv_row(os, ctx, s);
    const auto text = os.str();
    CHECK(text.rfind("# schema=v1\nt,r,regime,optimizer,value,lambda_term,cost_term,seed,iterations\n", 0) == 0);
    CHECK(solution_json(ctx, s).find("\"value\"") != std::string::npos);
  }
}
