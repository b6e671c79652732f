#include "pamlab/acceptance/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "pamlab/constants/constants.hpp"
#include "pamlab/core/error.hpp"
#include "pamlab/fk/fk.hpp"
#include "pamlab/meo/meo.hpp"
#include "pamlab/spectral/eigen.hpp"
#include "pamlab/spectral/semigroup.hpp"
#include "pamlab/variational/variational.hpp"

namespace pamlab::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string measured;
  std::string tolerance;
};

// ---- A1 ------------------------------------------------------------------

Outcome a1(const AcceptanceOptions&) {
  const double exact[2] = {std::numbers::pi * std::numbers::pi / 2.0, std::numbers::pi * std::numbers::pi};
  const int ms[3] = {8, 16, 32};
  bool ok = true;
  std::string meas;
  for (int d = 1; d <= 2; ++d) {
    double err[3];
    double lam[3];
    for (int k = 0; k < 3; ++k) {
      Site hi{0, 0, 0};
      auto dom = spectral::GridDomain::box(d, Site{0, 0, 0}, hi, ms[k]);
      auto op = spectral::assemble_operator(dom);
      spectral::EigenOptions eo;
      eo.tol = 1e-10;
      const auto res = spectral::principal_eigenpair(op, eo);
      ok = ok && res.converged;
      lam[k] = res.lambda;
      err[k] = std::abs(res.lambda - exact[d - 1]);
    }
    const double o1 = std::log2(err[0] / err[1]);
    const double o2 = std::log2(err[1] / err[2]);
    ok = ok && o1 >= 1.9 && o2 >= 1.9 && err[2] < err[1] && err[1] < err[0];
    ok = ok && err[2] / exact[d - 1] < 1e-2;
    meas += fmt("d=%d lambda_h=%.6f,%.6f,%.6f order=%.3f,%.3f; ", d, lam[0], lam[1], lam[2], o1, o2);
  }
  return {ok, meas, "order >= 1.9, errors decreasing, rel err at h=1/32 < 1e-2"};
}

// ---- A2 ------------------------------------------------------------------

Outcome a2(const AcceptanceOptions&) {
  const double v1 = constants::c_negative(1, 2.0, -1.0);
  const double v2 = constants::c_negative(2, 2.0, -1.0);
  const double e1 = std::abs(v1 - 4.0 / 3.0);
  const double e2 = std::abs(v2 - std::numbers::pi / 2.0);
  return {e1 <= 1e-12 && e2 <= 1e-12, fmt("c(1,2,-1)=%.15f c(2,2,-1)=%.15f", v1, v2), "|err| <= 1e-12 vs 4/3, pi/2"};
}

// ---- A3 ------------------------------------------------------------------

Outcome a3(const AcceptanceOptions& opt) {
  const auto fn = opt.one_dim_constant ? opt.one_dim_constant : [](double th) { return constants::one_dim_constant(th); };
  bool ok = true;
  double worst = 0.0;
  for (double th : {0.5, 1.0, 2.0, 3.0}) {
    const double m = variational::minimize_continuum_profile(th).value;
    const double e = std::abs(fn(th) - m);
    worst = std::max(worst, e);
    ok = ok && e <= 1e-8;
  }
  const double v1 = fn(1.0);
  ok = ok && std::abs(v1 - 2.221441) <= 1e-5;
  return {ok, fmt("max |const - min profile| = %.3e; const(1) = %.8f", worst, v1),
          "<= 1e-8 for theta in {0.5,1,2,3}; |const(1) - 2.221441| <= 1e-5"};
}

// ---- A4 ------------------------------------------------------------------

Outcome a4(const AcceptanceOptions& opt) {
  model::ModelParams p;
  p.dim = 1;
  p.alpha = 3.0;
  p.theta = 1.0;
  p.c0 = 1.0;
  std::vector<double> rs{16.0, 32.0, 64.0};
  if (opt.full) rs.push_back(128.0);
  std::vector<double> vals;
  std::string meas = "values";
  double h_max = 0.0;
  for (double r : rs) {
    const auto ctx = variational::context_for_scale(r, p);
    variational::IntervalOptions io;
    io.nodes_per_cell = 4;
    const auto s = variational::minimize_interval_1d(ctx, p, io);
    h_max = std::max(h_max, s.eig.h);
    vals.push_back(s.value);
    meas += fmt(" r=%g:%.6f", r, s.value);
  }
  bool dec = true;
  for (std::size_t i = 1; i < vals.size(); ++i) dec = dec && vals[i] < vals[i - 1];
  const double at64 = vals[2];
  const double rel = std::abs(at64 - 2.221441) / 2.221441;
  meas += fmt("; decreasing=%s; rel dev at r=64 = %.3f; h_max=%.4g", dec ? "yes" : "no", rel, h_max);
  return {dec && rel <= 0.15 && h_max <= 1.0 / 16.0, meas, "strictly decreasing; |v(64) - 2.221441| <= 15%; h <= 1/16"};
}

// ---- A5 ------------------------------------------------------------------

// Independent oracle: inf over a y grid for each q on a grid, trapezoid in q,
// tail 2/Q where y = 0 is optimal.
double brute_force_c_1_2_1() {
  const double Q = 40.0, dq = 0.005, Y = 6.0, dy = 0.002;
  const int nq = int(std::lround(Q / dq));
  const int ny = int(std::lround(Y / dy));
  double integral = 0.0;
  for (int i = 0; i <= nq; ++i) {
    const double q = i * dq;
    double g = HUGE_VAL;
    for (int j = -ny; j <= ny; ++j) {
      const double y = j * dy;
      const double z = q + y;
      if (z == 0.0) continue;
      g = std::min(g, 1.0 / (z * z) + std::abs(y));
    }
    integral += (i == 0 || i == nq ? 0.5 : 1.0) * g * dq;
  }
  return 2.0 * integral + 2.0 / Q;
}

Outcome a5(const AcceptanceOptions&) {
  const double c1 = constants::c_heavy_tail(1, 2.0, 1.0, 1.0, 1e-6);
  bool ok = true;
  std::string meas = fmt("c(1,2,1,1)=%.8f", c1);
  for (double p : {2.0, 4.0}) {
    const double cp = constants::c_heavy_tail(1, 2.0, 1.0, p, 1e-6);
    const double rel = std::abs(cp - std::pow(p, 2.0 / 3.0) * c1) / cp;
    ok = ok && rel <= 1e-4;
    meas += fmt(" p=%g rel=%.2e", p, rel);
  }
  const double bf = brute_force_c_1_2_1();
  const double rel = std::abs(bf - c1) / bf;
  ok = ok && rel <= 0.01;
  meas += fmt("; grid oracle=%.6f rel=%.2e", bf, rel);
  return {ok, meas, "scaling rel <= 1e-4; grid oracle rel <= 1e-2"};
}

// ---- A6 ------------------------------------------------------------------

struct ToyInstance {
  int dim;
  double r, t;
  int max_cells, cap;
  double halo;
};

bool connected(const std::vector<Site>& cells, int d) {
  std::vector<char> seen(cells.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t n = 1;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (seen[j]) continue;
      int diff = 0;
      for (int k = 0; k < d; ++k) diff += std::abs(cells[i][k] - cells[j][k]);
      if (diff == 1) {
        seen[j] = 1;
        ++n;
        stack.push_back(j);
      }
    }
  }
  return n == cells.size();
}

void subsets(const std::vector<Site>& all, std::size_t start, int left, std::vector<Site>& cur, int d,
             std::vector<std::vector<Site>>& out) {
  if (!cur.empty() && connected(cur, d)) out.push_back(cur);
  if (left == 0) return;
  for (std::size_t i = start; i < all.size(); ++i) {
    cur.push_back(all[i]);
    subsets(all, i + 1, left - 1, cur, d, out);
    cur.pop_back();
  }
}

long double brute_force_relevant_count(const ToyInstance& in) {
  const int d = in.dim;
  const int L = std::max(1, int(std::lround(in.t / in.r)));
  const int lo = -(L / 2);
  std::vector<Site> all;
  LatticeBox cb = LatticeBox::cube(d, lo, lo + L - 1);
  for (std::size_t i = 0; i < cb.size(); ++i) all.push_back(cb.site(i));
  std::vector<std::vector<Site>> animals;
  std::vector<Site> cur;
  subsets(all, 0, in.max_cells, cur, d, animals);
  long double moves = 0;
  LatticeBox mb = LatticeBox::cube(d, -in.cap, in.cap);
  for (std::size_t i = 0; i < mb.size(); ++i)
    if (norm2(mb.site(i), d) <= (long long)in.cap * in.cap) moves += 1;
  const int hs = int(std::floor(in.t / 2.0));
  LatticeBox lt = LatticeBox::cube(d, -hs, hs);
  long double total = 0;
  for (const auto& a : animals) {
    long double halo = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
      const Site q = lt.site(i);
      double best = HUGE_VAL;
      for (const Site& c : a) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
          const double a0 = in.r * c[k], a1 = in.r * (c[k] + 1);
          const double g = q[k] < a0 ? a0 - q[k] : q[k] > a1 ? q[k] - a1 : 0.0;
          s += g * g;
        }
        best = std::min(best, std::sqrt(s));
      }
      if (best < in.r * in.halo) halo += 1;
    }
    total += std::pow(moves, halo);
  }
  return total;
}

Outcome a6(const AcceptanceOptions&) {
  bool ok = true;
  std::string meas;
  model::ModelParams p;
  p.dim = 2;
  p.alpha = 4.0;
  p.theta = 1.0;
  p.c0 = 1.0;
  const auto meo_p = meo::choose_meo_params(p);
  for (double r : {32.0, 64.0, 128.0}) {
    const double t = 4.0 * r;
    const auto lam = spectral::GridDomain::centred_box(2, t / r, 2);
    const LatticeBox need = meo::classification_sites(2, lam.cell_bounds(), r);
    auto zero = model::DisplacementConfig::zeros(need);
    const auto rep0 = meo::classify_box(zero, r, t, meo_p, 2);
    // Expel every point beyond the classified region.
    auto gone = model::DisplacementConfig::zeros(need);
    const int shift = int(std::ceil(10.0 * r));
    for (std::size_t i = 0; i < need.size(); ++i) gone.set(need.site(i), Site{shift, 0, 0});
    const auto rep1 = meo::classify_box(gone, r, t, meo_p, 2);
    const bool e0 = rep0.rarefied.cells.empty();
    const bool full = rep1.rarefied.cells == rep0.lambda.cells;
    ok = ok && e0 && full;
    meas += fmt("r=%g: |R(0)|=%zu |R(expelled)|=%zu/%zu; ", r, rep0.rarefied.cells.size(), rep1.rarefied.cells.size(),
                rep0.lambda.cells.size());
  }
  const ToyInstance toys[10] = {
      {1, 1.5, 6.0, 2, 1, 1.0}, {1, 2.0, 8.0, 3, 1, 1.0}, {1, 1.0, 5.0, 2, 2, 0.5}, {1, 1.41, 4.0, 3, 1, 2.0},
      {1, 3.0, 12.0, 4, 1, 0.5}, {2, 1.0, 3.0, 2, 1, 0.5}, {2, 1.5, 3.0, 2, 1, 0.3}, {2, 1.0, 2.0, 3, 1, 0.2},
      {2, 1.0, 2.0, 4, 1, 0.3}, {3, 1.0, 1.0, 1, 1, 0.5}};
  int matched = 0;
  for (const auto& in : toys) {
    meo::RelevantCaps caps;
    caps.dim = in.dim;
    caps.max_cells = in.max_cells;
    caps.displacement_cap = in.cap;
    caps.halo = in.halo;
    caps.work_bound = 1'000'000'000'000ull;
    meo::RelevantEnumerator en(in.r, in.t, caps);
    const long double brute = brute_force_relevant_count(in);
    bool same = (long double)en.count() == brute;
    if (same && en.count() <= 200'000) {
      std::uint64_t streamed = 0;
      meo::RelevantPair pair;
      while (en.next(pair)) ++streamed;
      same = streamed == en.count();
    }
    matched += same ? 1 : 0;
  }
  ok = ok && matched == 10;
  meas += fmt("relevant counts matched %d/10", matched);
  return {ok, meas, "R(xi=0) empty; expelled gives full box; 10/10 counts equal"};
}

// ---- A7 ------------------------------------------------------------------

Outcome a7(const AcceptanceOptions& opt) {
  bool ok = true;
  std::string meas;
  {
    const model::ConstantPotential V(1, 0.5);
    fk::PathEstimator e;
    e.t = 2.0;
    e.n_paths = opt.full ? 100000 : 10000;
    const auto m = fk::quenched_mass(V, e, 7);
    const double exact = std::exp(-1.0);
    // The functional is deterministic for constant V; the floor absorbs round-off.
    const double tol = std::max(3.0 * m.std_err, 1e-12);
    ok = ok && std::abs(m.estimate - exact) <= tol;
    meas += fmt("const: %.12f vs %.12f (3SE=%.2e); ", m.estimate, exact, 3.0 * m.std_err);
  }
  model::ModelParams p;
  p.dim = 1;
  p.alpha = 4.0;
  p.theta = 1.0;
  p.c0 = 1.0;
  const model::SingleSitePotential u(p);
  const double R = model::default_trunc_radius(u);
  fk::PathEstimator e;
  e.t = 4.0;
  e.n_paths = opt.full ? 100000 : 10000;
  const model::DisplacementLaw law(1, p.theta);
  Rng rng = derive_stream(99, 0);
  const auto cfg = model::sample_config(law, fk::environment_box(p, e, R), rng);
  const auto m = fk::quenched_mass(cfg, p, e, 11);
  const int half = int(std::ceil(e.reach()));
  const auto dom = spectral::GridDomain::box(1, Site{-half, 0, 0}, Site{half - 1, 0, 0}, 32);
  const model::LatticePotential lp(u, cfg, R);
  const auto op = spectral::assemble_operator(dom, lp);
  const double sg = spectral::semigroup_total_mass(op, Point{0.0, 0.0, 0.0}, e.t, 2048);
  const double rate_fk = -std::log(m.estimate) / e.t;
  const double rate_sg = -std::log(sg) / e.t;
  const double rel = std::abs(rate_fk - rate_sg) / rate_sg;
  ok = ok && rel <= 0.10;
  meas += fmt("decay rate fk=%.5f semigroup=%.5f rel=%.3f", rate_fk, rate_sg, rel);
  return {ok, meas, "|est - e^-ct| <= 3 SE (floor 1e-12); decay rates within 10%"};
}

// ---- A8 ------------------------------------------------------------------

Outcome a8(const AcceptanceOptions& opt) {
  bool ok = true;
  std::string meas;
  {
    model::ModelParams p;
    p.dim = 1;
    p.alpha = 4.0;
    p.theta = 1.0;
    p.c0 = 1.0;
    fk::PathEstimator e;
    e.t = 2.0;
    e.n_paths = 256;
    e.start = fk::StartMode::Uniform;
    const auto s = fk::annealed_sample(p, {1.0, 2.0, 4.0}, opt.full ? 200 : 50, e, 5);
    double pm[3];
    for (int k = 0; k < 3; ++k) pm[k] = std::pow(s.moments[std::size_t(k)].mean, 1.0 / s.moments[std::size_t(k)].p);
    ok = ok && pm[0] <= pm[1] && pm[1] <= pm[2];
    meas += fmt("E[v^p]^(1/p) = %.6g, %.6g, %.6g; ", pm[0], pm[1], pm[2]);
  }
  {
    model::ModelParams q;
    q.dim = 1;
    q.alpha = 4.0;
    q.theta = 2.0;
    q.c0 = -1.0;
    fk::PathEstimator e;
    e.t = 4.0;
    e.n_paths = 256;
    const auto r = fk::intermittency_ratio(q, 1.0, 2.0, 200, e, 3, 2000, 0.95);
    ok = ok && r.ci.lower > 1.0 && !r.degenerate;
    meas += fmt("negative-u ratio=%.4f 95%% CI [%.4f, %.4f]", r.ratio, r.ci.lower, r.ci.upper);
  }
  return {ok, meas, "power means nondecreasing exactly; bootstrap lower bound > 1"};
}

// ---- A9 ------------------------------------------------------------------

Outcome a9(const AcceptanceOptions&) {
  model::ModelParams p;
  p.dim = 1;
  p.alpha = 3.0;
  p.theta = 1.0;
  p.c0 = 1.0;
  struct Inst {
    double t, halo;
  };
  const Inst insts[3] = {{4.0, 1.0}, {6.0, 1.0}, {8.0, 2.0}};
  bool ok = true;
  std::string meas;
  for (const auto& in : insts) {
    const auto ctx = variational::scaling_context(in.t, p);
    variational::CompareCaps caps;
    caps.max_cells = 3;
    caps.displacement_cap = 1;
    caps.halo = in.halo;
    caps.nodes_per_cell = 16;
    const auto c = variational::compare_variational_forms(ctx, p, caps);
    ok = ok && c.ratio >= 0.8 && c.ratio <= 1.25;
    meas += fmt("t=%g l=%g ratio=%.6f; ", in.t, in.halo, c.ratio);
  }
  return {ok, meas, "ratio in [0.8, 1.25]"};
}

// ---- A10 -----------------------------------------------------------------

Outcome a10(const AcceptanceOptions&) {
  std::vector<std::pair<double, double>> exact, noisy;
  Rng rng = derive_stream(2024, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k <= 10; ++k) {
    const double t = std::pow(2.0, k);
    const double v = -3.0 * std::sqrt(t);
    exact.emplace_back(t, v);
    noisy.emplace_back(t, v * (1.0 + 0.05 * gauss(rng)));
  }
  const auto f = fk::exponent_fit(exact);
  const auto g = fk::exponent_fit(noisy);
  const bool ok = std::abs(f.exponent - 0.5) < 1e-10 && std::abs(f.r_squared - 1.0) < 1e-12 &&
                  std::abs(g.exponent - 0.5) <= 0.05;
  return {ok, fmt("exact slope=%.12f r2=%.15f; noisy slope=%.4f r2=%.4f", f.exponent, f.r_squared, g.exponent, g.r_squared),
          "exact: |slope-0.5| < 1e-10, |r2-1| < 1e-12; noisy: |slope-0.5| <= 0.05"};
}

struct Entry {
  const char* id;
  const char* title;
  Outcome (*fn)(const AcceptanceOptions&);
  double fast_budget;
  double full_budget;
};

const Entry kEntries[] = {
    {"A1", "eigensolver oracle", a1, 30.0, 30.0},
    {"A2", "c_minus closed form", a2, 1.0, 1.0},
    {"A3", "one-dimensional constant", a3, 1.0, 1.0},
    {"A4", "variational interval convergence", a4, 600.0, 1800.0},
    {"A5", "heavy-tail scaling identity", a5, 60.0, 60.0},
    {"A6", "MEO sanity", a6, 120.0, 120.0},
    {"A7", "Feynman-Kac calibration", a7, 300.0, 1800.0},
    {"A8", "moment monotonicity and intermittency", a8, 600.0, 1800.0},
    {"A9", "variational form equivalence", a9, 300.0, 300.0},
    {"A10", "exponent fit harness", a10, 1.0, 1.0},
};

}  // namespace

CriterionResult run_criterion(const std::string& id, const AcceptanceOptions& options) {
  for (const auto& e : kEntries) {
    if (id != e.id) continue;
    CriterionResult r;
    r.id = e.id;
    r.title = e.title;
    r.budget_seconds = options.full ? e.full_budget : e.fast_budget;
    const auto t0 = Clock::now();
    try {
      const Outcome o = e.fn(options);
      r.pass = o.pass;
      r.measured = o.measured;
      r.tolerance = o.tolerance;
    } catch (const std::exception& ex) {
      r.pass = false;
      r.measured = std::string("error: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (r.seconds > r.budget_seconds) {
      r.pass = false;
      r.measured += fmt(" [over runtime budget %.0f s]", r.budget_seconds);
    }
    return r;
  }
  throw InvalidArgument("acceptance: unknown criterion " + id);
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<CriterionResult> out;
  for (const auto& e : kEntries) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), e.id) == options.only.end())
      continue;
    out.push_back(run_criterion(e.id, options));
  }
  return out;
}

void print_report(std::ostream& os, const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    os << fmt("%-4s %s  %s | %s | tol: %s | %.2f s\n", r.id.c_str(), r.pass ? "PASS" : "FAIL", r.title.c_str(),
              r.measured.c_str(), r.tolerance.c_str(), r.seconds);
  }
  std::size_t n = 0;
  for (const auto& r : results) n += r.pass ? 1 : 0;
  os << fmt("%zu/%zu criteria passed\n", n, results.size());
}

bool all_pass(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
}

}  // namespace pamlab::acceptance
