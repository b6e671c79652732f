#include "pamlab/fk/fk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>

#include "pamlab/core/error.hpp"
#include "pamlab/core/rng.hpp"

namespace pamlab::fk {

namespace {

constexpr std::uint64_t kEnvSalt = 0x5eed0e17ull;
constexpr std::uint64_t kStartSalt = 0x57a27ull;
constexpr std::uint64_t kBootSalt = 0xb0075ull;

std::string fmt_work(const char* f, double a, double b, double c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void check_sites(const LatticeBox& box, const FkOptions& opt, double R) {
  double n = 1.0;
  for (int k = 0; k < box.dim; ++k) n *= double(box.hi[k]) - double(box.lo[k]) + 1.0;
  if (n > double(opt.max_sites))
    throw WorkBoundExceeded(fmt_work("environment needs %.3g sites (bound %.3g); lower the truncation radius (now %g)",
                                     n, double(opt.max_sites), R));
}

// One block of paths; writes exp(-int V) per path into out.
void run_block(const model::PotentialField& V, const PathEstimator& est, const Point& x0, std::size_t n_steps,
               double dt, std::uint64_t seed, std::uint64_t env, std::uint64_t block, double* out,
               std::size_t count) {
  Rng rng = derive_stream(seed, env, block);
  std::normal_distribution<double> gauss(0.0, std::sqrt(dt));
  const int d = est.dim;
  const bool trap = est.integrator == Integrator::Trapezoid;
  for (std::size_t k = 0; k < count; ++k) {
    Point x = x0;
    double prev = V(x);
    double acc = 0.0;
    for (std::size_t s = 0; s < n_steps; ++s) {
      for (int a = 0; a < d; ++a) x[a] += gauss(rng);
      const double v = V(x);
      acc += trap ? 0.5 * (prev + v) : prev;
      prev = v;
    }
    out[k] = std::exp(-acc * dt);
  }
}

std::size_t n_blocks(std::size_t n_paths) { return (n_paths + kPathBlock - 1) / kPathBlock; }

MassEstimate summarize(std::vector<double>& values, std::size_t steps) {
  MassEstimate m;
  m.n_paths = values.size();
  m.steps = steps;
  m.estimate = numerics::mean(values);
  m.std_err = values.size() > 1 ? numerics::sample_stddev(values) / std::sqrt(double(values.size())) : 0.0;
  return m;
}

std::vector<double> path_values(const model::PotentialField& V, const PathEstimator& est, const Point& x0,
                                std::uint64_t seed, std::uint64_t env, bool parallel) {
  est.validate();
  require(V.dim() == est.dim, "quenched_mass: dimension mismatch");
  const std::size_t steps = est.steps();
  const double dt = est.t / double(steps);
  std::vector<double> values(est.n_paths);
  const std::size_t nb = n_blocks(est.n_paths);
  if (!parallel) {
    for (std::size_t b = 0; b < nb; ++b) {
      const std::size_t lo = b * kPathBlock;
      run_block(V, est, x0, steps, dt, seed, env, b, values.data() + lo, std::min(kPathBlock, est.n_paths - lo));
    }
    return values;
  }
  std::atomic<bool> failed{false};
  std::string message;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t bi = 0; bi < std::int64_t(nb); ++bi) {
    if (failed.load(std::memory_order_relaxed)) continue;
    const std::size_t b = std::size_t(bi);
    const std::size_t lo = b * kPathBlock;
    try {
      run_block(V, est, x0, steps, dt, seed, env, b, values.data() + lo, std::min(kPathBlock, est.n_paths - lo));
    } catch (const std::exception& e) {
#pragma omp critical(pamlab_fk_error)
      {
        if (!failed.exchange(true)) message = e.what();
      }
    }
  }
  if (failed) throw CoverageError("quenched_mass: " + message);
  return values;
}

std::vector<Point> start_points(const PathEstimator& est, std::uint64_t seed, std::uint64_t env) {
  const int d = est.dim;
  switch (est.start) {
    case StartMode::Fixed:
      return {est.x0};
    case StartMode::Uniform: {
      Rng rng = derive_stream(seed ^ kStartSalt, env);
      std::uniform_real_distribution<double> unif(-0.5, 0.5);
      Point x{0.0, 0.0, 0.0};
      for (int a = 0; a < d; ++a) x[a] = unif(rng);
      return {x};
    }
    case StartMode::Grid: {
      const int g = est.grid_per_axis;
      std::vector<Point> out;
      const int total = d == 1 ? g : d == 2 ? g * g : g * g * g;
      for (int i = 0; i < total; ++i) {
        Point x{0.0, 0.0, 0.0};
        int rem = i;
        for (int a = 0; a < d; ++a) {
          x[a] = -0.5 + (double(rem % g) + 0.5) / double(g);
          rem /= g;
        }
        out.push_back(x);
      }
      return out;
    }
  }
  return {est.x0};
}

// Per-axis extent of start points.
void start_extent(const PathEstimator& est, Point& lo, Point& hi) {
  for (int a = 0; a < kMaxDim; ++a) lo[a] = hi[a] = 0.0;
  for (int a = 0; a < est.dim; ++a) {
    if (est.start == StartMode::Fixed) {
      lo[a] = hi[a] = est.x0[a];
    } else {
      lo[a] = -0.5;
      hi[a] = 0.5;
    }
  }
}

double trunc_of(const model::ModelParams& params, const FkOptions& opt) {
  if (opt.trunc_radius > 0.0) return opt.trunc_radius;
  return model::default_trunc_radius(model::SingleSitePotential(params));
}

}  // namespace

void PathEstimator::validate() const {
  require(dim >= 1 && dim <= kMaxDim, "PathEstimator: dimension must be 1..3");
  require(t > 0.0 && std::isfinite(t), "PathEstimator: t must be positive");
  require(n_paths >= 1, "PathEstimator: n_paths must be >= 1");
  require(dt >= 0.0, "PathEstimator: dt must be nonnegative");
  const double h = step();
  const double n = std::round(t / h);
  require(n >= 1.0 && std::abs(n * h - t) <= 1e-9 * t, "PathEstimator: dt must divide t");
  require(start != StartMode::Grid || grid_per_axis >= 1, "PathEstimator: grid_per_axis must be >= 1");
}

std::size_t PathEstimator::steps() const { return std::size_t(std::llround(t / step())); }

double PathEstimator::reach() const { return 6.0 * std::sqrt(t * double(dim)); }

MassEstimate quenched_mass(const model::PotentialField& V, const PathEstimator& est, std::uint64_t seed,
                           std::uint64_t env_index) {
  auto values = path_values(V, est, est.x0, seed, env_index, true);
  return summarize(values, est.steps());
}

MassEstimate quenched_mass_serial(const model::PotentialField& V, const PathEstimator& est, std::uint64_t seed,
                                  std::uint64_t env_index) {
  auto values = path_values(V, est, est.x0, seed, env_index, false);
  return summarize(values, est.steps());
}

LatticeBox environment_box(const model::ModelParams& params, const PathEstimator& est, double trunc_radius) {
  est.validate();
  require(params.dim == est.dim, "environment_box: dimension mismatch");
  Point lo, hi;
  start_extent(est, lo, hi);
  const double w = est.reach() + trunc_radius;
  if (!(w < 1e8)) throw WorkBoundExceeded("environment_box: reach plus truncation radius exceeds 1e8");
  Site a{0, 0, 0}, b{0, 0, 0};
  for (int k = 0; k < est.dim; ++k) {
    a[k] = int(std::floor(lo[k] - w)) - 1;
    b[k] = int(std::ceil(hi[k] + w)) + 1;
  }
  return LatticeBox::from_bounds(est.dim, a, b);
}

std::unique_ptr<model::TabulatedPotential> environment_field(const model::ModelParams& params,
                                                             const model::DisplacementConfig& config,
                                                             const PathEstimator& est, const FkOptions& opt) {
  est.validate();
  const model::SingleSitePotential u(params);
  const double R = trunc_of(params, opt);
  Point lo, hi;
  start_extent(est, lo, hi);
  const double w = est.reach();
  double volume = 1.0;
  for (int k = 0; k < est.dim; ++k) {
    lo[k] -= w;
    hi[k] += w;
    volume *= hi[k] - lo[k];
  }
  double spacing = opt.table_spacing > 0.0 ? opt.table_spacing : 1.0 / 64.0;
  const double min_spacing = std::pow(volume / double(opt.max_table), 1.0 / est.dim);
  spacing = std::max(spacing, min_spacing);
  double table = 1.0;
  for (int k = 0; k < est.dim; ++k) table *= std::floor((hi[k] - lo[k]) / spacing) + 1.0;
  const double work = table * std::pow(2.0 * R + 1.0, est.dim);
  if (work > opt.work_bound)
    throw WorkBoundExceeded(fmt_work("environment_field: tabulation needs ~%.3g site evaluations (bound %.3g); "
                                     "lower the truncation radius (now %g)",
                                     work, opt.work_bound, R));
  const model::LatticePotential field(u, config, R);
  for (const Point& corner : {lo, hi})
    if (!field.covers(corner)) throw CoverageError("quenched_mass: configuration does not cover the reach box");
  return std::make_unique<model::TabulatedPotential>(field, lo, hi, spacing);
}

MassEstimate quenched_mass(const model::DisplacementConfig& config, const model::ModelParams& params,
                           const PathEstimator& est, std::uint64_t seed, const FkOptions& opt) {
  const auto V = environment_field(params, config, est, opt);
  return quenched_mass(*V, est, seed);
}

model::DisplacementConfig sample_environment(const model::ModelParams& params, const PathEstimator& est,
                                             std::uint64_t seed, std::uint64_t env, const FkOptions& opt) {
  params.validate();
  const double R = trunc_of(params, opt);
  const LatticeBox box = environment_box(params, est, R);
  check_sites(box, opt, R);
  if (opt.zero_displacements) return model::DisplacementConfig::zeros(box);
  const model::DisplacementLaw law(params.dim, params.theta);
  Rng rng = derive_stream(seed ^ kEnvSalt, env);
  return model::sample_config(law, box, rng);
}

MomentSample annealed_sample(const model::ModelParams& params, const std::vector<double>& ps, std::size_t n_env,
                             const PathEstimator& est, std::uint64_t seed, const FkOptions& opt) {
  params.validate();
  est.validate();
  require(n_env >= 2, "annealed_moment: n_env must be >= 2");
  require(!ps.empty(), "annealed_moment: no moment orders");
  for (double p : ps) require(p >= 1.0, "annealed_moment: requires p >= 1");
  const model::DisplacementLaw law(params.dim, params.theta);
  const double R = trunc_of(params, opt);
  const LatticeBox box = environment_box(params, est, R);
  check_sites(box, opt, R);
  FkOptions local = opt;
  local.trunc_radius = R;

  MomentSample out;
  out.masses.resize(n_env);
  out.powers.assign(ps.size(), std::vector<double>(n_env));
  for (std::size_t e = 0; e < n_env; ++e) {
    Rng env_rng = derive_stream(seed ^ kEnvSalt, e);
    const auto config = opt.zero_displacements ? model::DisplacementConfig::zeros(box)
                                               : model::sample_config(law, box, env_rng);
    const auto starts = start_points(est, seed, e);
    PathEstimator pe = est;
    if (est.start != StartMode::Fixed) {
      pe.start = StartMode::Uniform;  // field over Lambda_1 plus reach
    }
    const auto V = environment_field(params, config, pe, local);
    std::vector<double> vs(starts.size());
    for (std::size_t s = 0; s < starts.size(); ++s) {
      const std::uint64_t env_id = opt.shared_paths ? s : e * starts.size() + s;
      auto pv = path_values(*V, est, starts[s], seed, env_id, true);
      vs[s] = numerics::mean(pv);
    }
    out.masses[e] = numerics::mean(vs);
    for (std::size_t k = 0; k < ps.size(); ++k) {
      if (starts.size() == 1) {
        out.powers[k][e] = std::pow(vs[0], ps[k]);
      } else {
        std::vector<double> pw(vs.size());
        for (std::size_t s = 0; s < vs.size(); ++s) pw[s] = std::pow(vs[s], ps[k]);
        out.powers[k][e] = numerics::mean(pw);
      }
    }
  }
  for (std::size_t k = 0; k < ps.size(); ++k) {
    MomentEstimate m;
    m.p = ps[k];
    m.mean = numerics::mean(out.powers[k]);
    m.std_err = numerics::sample_stddev(out.powers[k]) / std::sqrt(double(n_env));
    m.n_env = n_env;
    m.n_paths = est.n_paths;
    m.seed = seed;
    out.moments.push_back(m);
  }
  return out;
}

MomentEstimate annealed_moment(const model::ModelParams& params, double p, std::size_t n_env,
                               const PathEstimator& est, std::uint64_t seed, const FkOptions& opt) {
  return annealed_sample(params, {p}, n_env, est, seed, opt).moments.front();
}

RatioEstimate ratio_from_sample(const MomentSample& s, std::size_t i1, std::size_t i2, double p1, double p2,
                                std::size_t n_boot, std::uint64_t seed, double level) {
  require(i1 < s.powers.size() && i2 < s.powers.size(), "intermittency_ratio: bad moment index");
  require(level > 0.0 && level < 1.0, "intermittency_ratio: level must lie in (0, 1)");
  const auto& a = s.powers[i1];
  const auto& b = s.powers[i2];
  const std::size_t n = a.size();
  RatioEstimate out;
  out.n_boot = n_boot;
  auto ratio_of = [&](double m1, double m2) { return std::pow(m2, 1.0 / p2) / std::pow(m1, 1.0 / p1); };
  const bool all_equal = std::all_of(s.masses.begin(), s.masses.end(), [&](double v) { return v == s.masses[0]; });
  if (p1 == p2 && i1 == i2) {
    out.ratio = 1.0;
    out.ci = {1.0, 1.0};
    out.degenerate = all_equal;
    return out;
  }
  if (all_equal) {
    // v is constant over environments: the power means coincide.
    out.ratio = 1.0;
    out.ci = {1.0, 1.0};
    out.degenerate = true;
    return out;
  }
  out.ratio = ratio_of(numerics::mean(a), numerics::mean(b));
  std::vector<double> reps(n_boot);
  std::vector<double> ra(n), rb(n);
  for (std::size_t r = 0; r < n_boot; ++r) {
    Rng rng = derive_stream(seed ^ kBootSalt, r);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = pick(rng);
      ra[i] = a[j];
      rb[i] = b[j];
    }
    reps[r] = ratio_of(numerics::mean(ra), numerics::mean(rb));
  }
  if (n_boot > 0) {
    const double tail = 0.5 * (1.0 - level);
    out.ci = {numerics::quantile(reps, tail), numerics::quantile(reps, 1.0 - tail)};
  } else {
    out.ci = {out.ratio, out.ratio};
  }
  return out;
}

RatioEstimate intermittency_ratio(const model::ModelParams& params, double p1, double p2, std::size_t n_env,
                                  const PathEstimator& est, std::uint64_t seed, std::size_t n_boot, double level,
                                  const FkOptions& opt) {
  require(p1 >= 1.0 && p2 >= p1, "intermittency_ratio: requires 1 <= p1 <= p2");
  if (p1 == p2) {
    const auto s = annealed_sample(params, {p1}, n_env, est, seed, opt);
    return ratio_from_sample(s, 0, 0, p1, p1, n_boot, seed, level);
  }
  const auto s = annealed_sample(params, {p1, p2}, n_env, est, seed, opt);
  return ratio_from_sample(s, 0, 1, p1, p2, n_boot, seed, level);
}

ExponentFit exponent_fit(const std::vector<std::pair<double, double>>& series) {
  require(series.size() >= 4, "exponent_fit: needs at least 4 points");
  const bool neg = series.front().second < 0.0;
  for (const auto& [t, v] : series) {
    require(t > 0.0, "exponent_fit: times must be positive");
    require(v != 0.0 && (v < 0.0) == neg, "exponent_fit: log values must share one strict sign");
  }
  const std::size_t n = series.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(series[i].first);
    y[i] = std::log(std::abs(series[i].second));
  }
  const double mx = numerics::mean(x), my = numerics::mean(y);
  std::vector<double> sxx(n), sxy(n), syy(n);
  for (std::size_t i = 0; i < n; ++i) {
    sxx[i] = (x[i] - mx) * (x[i] - mx);
    sxy[i] = (x[i] - mx) * (y[i] - my);
    syy[i] = (y[i] - my) * (y[i] - my);
  }
  const double Sxx = numerics::pairwise_sum(sxx), Sxy = numerics::pairwise_sum(sxy), Syy = numerics::pairwise_sum(syy);
  require(Sxx > 0.0, "exponent_fit: times must not all coincide");
  require(Syy > 1e-24 * std::max(1.0, my * my), "exponent_fit: constant series has no slope signal");
  ExponentFit f;
  f.exponent = Sxy / Sxx;
  f.intercept = my - f.exponent * mx;
  f.r_squared = std::min(1.0, Sxy * Sxy / (Sxx * Syy));
  f.points = n;
  f.t_min = f.t_max = series.front().first;
  for (const auto& pt : series) {
    f.t_min = std::min(f.t_min, pt.first);
    f.t_max = std::max(f.t_max, pt.first);
  }
  return f;
}

void write_moment_csv_header(std::ostream& os) {
  os << "# schema=v1\n";
  os << "t,p,mean,std_err,n_env,n_paths,dt,seed,regime\n";
}

void write_moment_csv_row(std::ostream& os, const model::ModelParams& params, const PathEstimator& est,
                          const MomentEstimate& m) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%zu,%zu,%.17g,%llu,%s\n", est.t, m.p, m.mean, m.std_err,
                m.n_env, m.n_paths, est.step(), (unsigned long long)m.seed,
                model::to_string(model::classify_regime(params)).c_str());
  os << buf;
}

}  // namespace pamlab::fk
