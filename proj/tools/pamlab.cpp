// pamlab: command-line driver for the experiments and acceptance suites.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pamlab/acceptance/acceptance.hpp"
#include "pamlab/constants/constants.hpp"
#include "pamlab/core/error.hpp"
#include "pamlab/fk/fk.hpp"
#include "pamlab/io/config.hpp"
#include "pamlab/io/manifest.hpp"
#include "pamlab/meo/meo.hpp"
#include "pamlab/spectral/analysis.hpp"
#include "pamlab/spectral/eigen.hpp"
#include "pamlab/variational/variational.hpp"

namespace fs = std::filesystem;
using namespace pamlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitInvalid = 3;

std::string fmt(const char* f, auto... args) {
  char buf[2048];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// One run: resolved configuration, named output streams and a summary.
struct Run {
  std::string command;  // "fk annealed"
  io::Config config;
  std::uint64_t seed = 1;
  std::map<std::string, std::ostringstream> files;  // suffix -> content
  std::ostringstream summary;

  std::ostream& file(const std::string& suffix) { return files[suffix]; }
};

model::ModelParams params_of(const Run& run) { return io::model_params(run.config); }

// ---- constants -------------------------------------------------------------

void cmd_constants(Run& run) {
  const auto& c = run.config;
  const std::string kind = c.get_string("constants.kind", "c_minus");
  auto& os = run.file(".csv");
  os << "# schema=v1\n";
  if (kind == "c_minus") {
    const int d = int(c.get_int("model.dimension", 1));
    const double th = c.get_double("model.theta", 1.0);
    const double K = c.get_double("constants.k", -1.0);
    const double v = constants::c_negative(d, th, K);
    os << "kind,d,theta,K,value\n" << fmt("c_minus,%d,%.17g,%.17g,%.17g\n", d, th, K, v);
    run.summary << fmt("c_-(d=%d, theta=%g, K=%g) = %.12f\n", d, th, K, v);
  } else if (kind == "heavy_tail") {
    const auto p = params_of(run);
    const double tol = c.get_double("constants.tol", 1e-8);
    const auto r = constants::c_heavy_tail_detail(p.dim, p.alpha, p.theta, p.c0, tol);
    os << "kind,d,alpha,theta,c0,value,error_bound,cutoff\n"
       << fmt("heavy_tail,%d,%.17g,%.17g,%.17g,%.17g,%.6g,%.17g\n", p.dim, p.alpha, p.theta, p.c0, r.value,
              r.error_bound, r.cutoff);
    run.summary << fmt("c(%d, %g, %g, %g) = %.12f (error bound %.2e)\n", p.dim, p.alpha, p.theta, p.c0, r.value,
                       r.error_bound);
  } else if (kind == "one_dim") {
    const auto p = params_of(run);
    require(p.dim == 1 && p.alpha > 3.0, "constants: one_dim requires d = 1 and alpha > 3");
    const double v = constants::one_dim_constant(p.theta);
    os << "kind,theta,value\n" << fmt("one_dim,%.17g,%.17g\n", p.theta, v);
    run.summary << fmt("one-dimensional constant at theta = %g: %.12f\n", p.theta, v);
  } else if (kind == "prediction") {
    const auto p = params_of(run);
    const double t = c.get_double("constants.t", 100.0);
    const double pp = c.get_double("constants.p", 1.0);
    const auto r = constants::predicted_log_moment(p, t, pp);
    os << "kind,regime,t,p,exponent,rate,value,order_only,log_correction\n"
       << fmt("prediction,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n", model::to_string(r.regime).c_str(), t, pp,
              r.exponent, r.rate, r.value, int(r.order_only), int(r.log_correction));
    run.summary << fmt("log E[v^%g](t=%g): exponent %.6f, value %.6g%s\n", pp, t, r.exponent, r.value,
                       r.order_only ? " (order only)" : "");
  } else if (kind == "gap") {
    const auto p = params_of(run);
    const double t = c.get_double("constants.t", 100.0);
    const double p1 = c.get_double("constants.p", 1.0);
    const double p2 = c.get_double("constants.p2", 2.0);
    std::optional<double> c1, c2;
    if (c.has("constants.c1")) c1 = c.get_double("constants.c1", 0.0);
    if (c.has("constants.c2")) c2 = c.get_double("constants.c2", 0.0);
    const auto g = constants::intermittency_gap(p, t, p1, p2, c1, c2);
    os << "kind,t,p1,p2,value,lower,upper,two_sided\n"
       << fmt("gap,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", t, p1, p2, g.value, g.lower, g.upper, int(g.two_sided));
    run.summary << fmt("log intermittency gap: %.6g [%.6g, %.6g]\n", g.value, g.lower, g.upper);
  } else {
    throw InvalidArgument("constants: unknown kind '" + kind + "'");
  }
}

// ---- eigen -----------------------------------------------------------------

void cmd_eigen(Run& run) {
  const auto& c = run.config;
  const auto p = params_of(run);
  const auto hs = c.get_list("eigen.h", {0.125, 0.0625, 0.03125});
  const double side = c.get_double("eigen.side", 1.0);
  const std::string pot = c.get_string("eigen.potential", "none");
  spectral::EigenOptions eo;
  eo.tol = c.get_double("eigen.tol", 1e-8);
  eo.max_iter = int(c.get_int("eigen.max_iter", 200));
  std::optional<model::DisplacementConfig> cfg;
  const double r = c.get_double("eigen.r", 1.0);
  if (pot == "config") {
    std::ifstream in(c.get_string("eigen.config", ""));
    if (!in) throw InvalidArgument("eigen: cannot read eigen.config");
    cfg = model::read_config(in, p.dim);
  } else if (pot != "none") {
    throw InvalidArgument("eigen: potential must be none or config");
  }
  auto& os = run.file(".csv");
  os << "# schema=v1\n";
  os << "h,lambda,residual,iterations,converged,nodes\n";
  spectral::SpectralResult last;
  std::shared_ptr<const spectral::Mesh> last_mesh;
  for (double h : hs) {
    require(h > 0.0, "eigen: mesh widths must be positive");
    const int m_per = int(std::lround(1.0 / h));
    require(m_per >= 1 && std::abs(m_per * h - 1.0) < 1e-9, "eigen: 1/h must be an integer");
    const auto dom = spectral::GridDomain::centred_box(p.dim, side, m_per);
    auto mesh = std::make_shared<const spectral::Mesh>(dom);
    std::vector<double> V(mesh->size(), 0.0);
    if (cfg) {
      const model::SingleSitePotential u(p);
      const model::PointCloudPotential field(u, model::PointCloudPotential::centres_of(*cfg), r);
      V = spectral::sample_potential(*mesh, field);
    }
    spectral::SchrodingerOperator op(mesh, std::move(V));
    const auto res = spectral::principal_eigenpair(op, eo);
    if (!res.converged) throw NonConvergence(fmt("eigen: no convergence at h = %g (residual %.3g)", h, res.residual));
    os << fmt("%.17g,%.17g,%.6g,%d,%d,%zu\n", h, res.lambda, res.residual, res.iterations, int(res.converged),
              op.size());
    run.summary << fmt("h = %-10g lambda = %.10f  residual %.2e\n", h, res.lambda, res.residual);
    last = res;
    last_mesh = mesh;
  }
  if (c.get_bool("eigen.eigenfunction", false) && last_mesh) spectral::write_eigen_csv(run.file("-phi.csv"), *last_mesh, last);
}

// ---- variational -------------------------------------------------------------

void cmd_variational(Run& run) {
  const auto& c = run.config;
  const auto p = params_of(run);
  const std::string form = c.get_string("variational.form", "interval");
  const double mesh_h = c.get_double("run.mesh", 0.0);
  auto& os = run.file(".csv");
  if (form == "interval") {
    const double r = c.get_double("variational.r", 64.0);
    const auto ctx = variational::context_for_scale(r, p);
    variational::IntervalOptions io;
    io.nodes_per_cell = int(c.get_int("variational.interval_nodes", 4));
    if (mesh_h > 0.0) io.nodes_per_cell = std::max(2, int(std::ceil(1.0 / (mesh_h * r) - 1e-9)));
    io.halo = c.get_double("variational.halo", 4.0);
    io.max_length = c.get_double("variational.max_length", 8.0);
    const auto s = variational::minimize_interval_1d(ctx, p, io);
    variational::write_solution_csv_header(os);
    variational::write_solution_csv_row(os, ctx, s);
    run.file(".solution.json") << variational::solution_json(ctx, s) << "\n";
    run.summary << fmt("interval (%d/r, %d/r) at r = %g: value %.8f = lambda %.8f + cost %.8f\n", s.interval_m,
                       s.interval_n, r, s.value, s.lambda, s.cost);
  } else if (form == "functional") {
    const double t = c.get_double("variational.t", 16.0);
    const auto ctx = variational::scaling_context(t, p);
    variational::OptimizerOptions oo;
    oo.method = variational::parse_optimizer(c.get_string("variational.optimizer", "greedy"));
    oo.budget = int(c.get_int("variational.budget", 2000));
    oo.restarts = int(c.get_int("variational.restarts", 1));
    oo.nodes_per_cell = int(c.get_int("variational.nodes_per_cell", 8));
    if (mesh_h > 0.0) oo.nodes_per_cell = std::max(2, int(std::lround(1.0 / mesh_h)));
    oo.seed = run.seed;
    const auto s = variational::minimize_functional(ctx, p, oo);
    variational::write_solution_csv_header(os);
    variational::write_solution_csv_row(os, ctx, s);
    run.file(".solution.json") << variational::solution_json(ctx, s) << "\n";
    auto& tr = run.file("-trace.csv");
    tr << "# schema=v1\nevaluation,value,best,accepted,move\n";
    for (const auto& e : s.trace)
      tr << fmt("%d,%.17g,%.17g,%d,%s\n", e.evaluation, e.value, e.best, int(e.accepted), e.move.c_str());
    run.summary << fmt("t = %g, r = %.6g: value %.8f (lambda %.8f + cost %.8f), %d eigensolves%s\n", t, ctx.r, s.value,
                       s.lambda, s.cost, s.evaluations, s.budget_exhausted ? ", budget exhausted" : "");
  } else if (form == "compare") {
    const double t = c.get_double("variational.t", 16.0);
    const auto ctx = variational::scaling_context(t, p);
    variational::CompareCaps caps;
    caps.max_cells = int(c.get_int("variational.max_cells", 2));
    caps.displacement_cap = int(c.get_int("variational.displacement_cap", 1));
    caps.halo = c.get_double("variational.halo", 1.0);
    caps.nodes_per_cell = int(c.get_int("variational.nodes_per_cell", 8));
    if (mesh_h > 0.0) caps.nodes_per_cell = std::max(2, int(std::lround(1.0 / mesh_h)));
    const auto f = variational::compare_variational_forms(ctx, p, caps);
    os << "# schema=v1\nt,r,relevant_infimum,full_infimum,ratio,epsilon,relevant_pairs,full_configs\n"
       << fmt("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%llu,%llu\n", ctx.t, ctx.r, f.relevant_infimum, f.full_infimum,
              f.ratio, f.epsilon, (unsigned long long)f.relevant_pairs, (unsigned long long)f.full_configs);
    run.summary << fmt("relevant %.8f / full %.8f = %.8f\n", f.relevant_infimum, f.full_infimum, f.ratio);
  } else {
    throw InvalidArgument("variational: form must be functional, interval or compare");
  }
}

// ---- meo -------------------------------------------------------------------

meo::MeoParams meo_params_for(const model::ModelParams& p) {
  if (p.dim >= 2) return meo::choose_meo_params(p);
  return meo::MeoParams{};
}

void cmd_meo(Run& run, const std::string& sub) {
  const auto& c = run.config;
  const auto p = params_of(run);
  const double r = c.get_double("meo.r", 32.0);
  const double t = c.get_double("meo.t", 128.0);
  auto& os = run.file(".csv");
  if (sub == "classify") {
    const auto mp = meo_params_for(p);
    const auto lam = spectral::GridDomain::centred_box(p.dim, t / r, 2);
    model::DisplacementConfig cfg;
    const std::string path = c.get_string("meo.config", "");
    if (path.empty()) {
      cfg = model::DisplacementConfig::zeros(meo::classification_sites(p.dim, lam.cell_bounds(), r));
    } else {
      std::ifstream in(path);
      if (!in) throw InvalidArgument("meo: cannot read " + path);
      cfg = model::read_config(in, p.dim);
    }
    const auto rep = meo::classify_box(cfg, r, t, mp);
    meo::write_density_csv(os, r, t, mp, rep);
    run.summary << fmt("%zu of %zu cubes rarefied\n", rep.rarefied.cells.size(), rep.lambda.cells.size());
  } else if (sub == "volume") {
    const auto mp = meo_params_for(p);
    const auto trial = meo::volume_bound_trial(p, r, t, mp, std::size_t(c.get_uint("meo.samples", 100)), run.seed);
    meo::write_volume_csv(os, r, t, mp, trial);
    run.summary << fmt("P(|R_r| >= r^chi) ~ %.4g [%.4g, %.4g] from %zu samples\n", trial.probability,
                       trial.wilson.lower, trial.wilson.upper, trial.samples);
  } else if (sub == "enumerate") {
    meo::RelevantCaps caps;
    caps.dim = p.dim;
    caps.max_cells = int(c.get_int("meo.max_cells", 2));
    caps.displacement_cap = int(c.get_int("meo.displacement_cap", 1));
    caps.halo = c.get_double("meo.halo", 1.0);
    caps.work_bound = c.get_uint("meo.work_bound", 10'000'000);
    const meo::RelevantEnumerator en(r, t, caps);
    os << "# schema=v1\nr,t,max_cells,displacement_cap,halo,animals,moves,count\n"
       << fmt("%.17g,%.17g,%d,%d,%.17g,%zu,%zu,%llu\n", r, t, caps.max_cells, caps.displacement_cap, caps.halo,
              en.animals(), en.displacement_set().size(), (unsigned long long)en.count());
    run.summary << fmt("%llu relevant pairs over %zu animals\n", (unsigned long long)en.count(), en.animals());
  } else {
    throw InvalidArgument("meo: subcommand must be classify, volume or enumerate");
  }
}

// ---- fk --------------------------------------------------------------------

fk::PathEstimator estimator_of(const io::Config& c, const model::ModelParams& p, double t) {
  fk::PathEstimator e;
  e.dim = p.dim;
  e.t = t;
  e.dt = c.get_double("fk.dt", 0.0);
  e.n_paths = std::size_t(c.get_uint("fk.n_paths", 1000));
  const std::string integ = c.get_string("fk.integrator", "left");
  if (integ == "left")
    e.integrator = fk::Integrator::LeftPoint;
  else if (integ == "trapezoid")
    e.integrator = fk::Integrator::Trapezoid;
  else
    throw InvalidArgument("fk: integrator must be left or trapezoid");
  const std::string start = c.get_string("fk.start", "uniform");
  if (start == "fixed")
    e.start = fk::StartMode::Fixed;
  else if (start == "uniform")
    e.start = fk::StartMode::Uniform;
  else if (start == "grid")
    e.start = fk::StartMode::Grid;
  else
    throw InvalidArgument("fk: start must be fixed, uniform or grid");
  const auto x0 = c.get_list("fk.x0", {0.0});
  for (int a = 0; a < p.dim; ++a) e.x0[a] = a < int(x0.size()) ? x0[std::size_t(a)] : 0.0;
  e.grid_per_axis = int(c.get_int("fk.grid", 4));
  e.validate();
  return e;
}

fk::FkOptions fk_options_of(const io::Config& c) {
  fk::FkOptions o;
  o.trunc_radius = c.get_double("model.trunc_radius", 0.0);
  return o;
}

void cmd_fk(Run& run, const std::string& sub) {
  const auto& c = run.config;
  const auto p = params_of(run);
  const auto ts = c.get_list("fk.t", {1.0, 2.0, 4.0});
  const auto ps = c.get_list("fk.p", {1.0, 2.0});
  const std::size_t n_env = std::size_t(c.get_uint("fk.n_env", 50));
  const auto opt = fk_options_of(c);
  auto& os = run.file(".csv");
  if (sub == "quenched") {
    double t_max = 0.0;
    for (double t : ts) t_max = std::max(t_max, t);
    auto e_max = estimator_of(c, p, t_max);
    e_max.start = fk::StartMode::Fixed;
    const std::uint64_t env = c.get_uint("fk.env_seed", 0);
    const auto cfg = fk::sample_environment(p, e_max, run.seed, env, opt);
    os << "# schema=v1\nt,estimate,std_err,n_paths,dt,seed,env\n";
    for (double t : ts) {
      auto e = estimator_of(c, p, t);
      e.start = fk::StartMode::Fixed;
      const auto m = fk::quenched_mass(cfg, p, e, run.seed, opt);
      os << fmt("%.17g,%.17g,%.17g,%zu,%.17g,%llu,%llu\n", t, m.estimate, m.std_err, m.n_paths, e.step(),
                (unsigned long long)run.seed, (unsigned long long)env);
      run.summary << fmt("t = %-6g v = %.8g +- %.2g\n", t, m.estimate, m.std_err);
    }
  } else if (sub == "annealed") {
    fk::write_moment_csv_header(os);
    for (double t : ts) {
      const auto e = estimator_of(c, p, t);
      const auto s = fk::annealed_sample(p, ps, n_env, e, run.seed, opt);
      for (const auto& m : s.moments) {
        fk::write_moment_csv_row(os, p, e, m);
        run.summary << fmt("t = %-6g p = %-4g E[v^p] = %.8g +- %.2g\n", t, m.p, m.mean, m.std_err);
      }
    }
  } else if (sub == "ratio") {
    require(ps.size() >= 2, "fk ratio: needs two moment orders in fk.p");
    const std::size_t n_boot = std::size_t(c.get_uint("fk.n_boot", 2000));
    const double level = c.get_double("fk.level", 0.95);
    os << "# schema=v1\nt,p1,p2,ratio,ci_lower,ci_upper,degenerate,n_env,n_paths,n_boot,seed\n";
    for (double t : ts) {
      const auto e = estimator_of(c, p, t);
      const auto r = fk::intermittency_ratio(p, ps[0], ps[1], n_env, e, run.seed, n_boot, level, opt);
      os << fmt("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%zu,%zu,%zu,%llu\n", t, ps[0], ps[1], r.ratio, r.ci.lower,
                r.ci.upper, int(r.degenerate), n_env, e.n_paths, n_boot, (unsigned long long)run.seed);
      run.summary << fmt("t = %-6g ratio = %.6g [%.6g, %.6g]%s\n", t, r.ratio, r.ci.lower, r.ci.upper,
                         r.degenerate ? " (degenerate)" : "");
    }
  } else {
    throw InvalidArgument("fk: subcommand must be quenched, annealed or ratio");
  }
}

// ---- exponent ----------------------------------------------------------------

void cmd_exponent(Run& run) {
  const std::string path = run.config.get_string("exponent.input", "");
  std::ifstream in(path);
  if (!in) throw InvalidArgument("exponent: cannot read exponent.input '" + path + "'");
  std::string line;
  std::vector<std::string> header;
  std::vector<std::pair<double, double>> series;
  int it = -1, iv = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (header.empty()) {
      header = cols;
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "t") it = int(i);
        if (cols[i] == "log_value") iv = int(i);
      }
      require(it >= 0 && iv >= 0, "exponent: input needs columns t and log_value");
      continue;
    }
    require(int(cols.size()) > std::max(it, iv), "exponent: short row");
    series.emplace_back(std::stod(cols[std::size_t(it)]), std::stod(cols[std::size_t(iv)]));
  }
  const auto f = fk::exponent_fit(series);
  auto& os = run.file(".csv");
  os << "# schema=v1\nexponent,intercept,r_squared,t_min,t_max,points\n"
     << fmt("%.17g,%.17g,%.17g,%.17g,%.17g,%zu\n", f.exponent, f.intercept, f.r_squared, f.t_min, f.t_max, f.points);
  run.summary << fmt("exponent %.6f (r^2 = %.6f) over t in [%g, %g]\n", f.exponent, f.r_squared, f.t_min, f.t_max);
}

// ---- dispatch and artifacts --------------------------------------------------

void dispatch(Run& run) {
  std::istringstream words(run.command);
  std::string head, sub;
  words >> head >> sub;
  (void)params_of(run);  // reject an invalid model before any work
  if (head == "constants")
    cmd_constants(run);
  else if (head == "eigen")
    cmd_eigen(run);
  else if (head == "variational")
    cmd_variational(run);
  else if (head == "meo")
    cmd_meo(run, sub);
  else if (head == "fk")
    cmd_fk(run, sub);
  else if (head == "exponent")
    cmd_exponent(run);
  else
    throw InvalidArgument("unknown command '" + run.command + "'");
}

std::string slug(std::string s) {
  for (char& ch : s)
    if (ch == ' ') ch = '-';
  return s;
}

int execute(Run& run, const std::string& out_dir, int threads) {
  dispatch(run);
  io::Manifest m;
  m.command = run.command;
  m.config = run.config;
  m.config.erase("run.threads");
  m.seed = run.seed;
  m.threads = threads;
  const std::string base = slug(run.command) + "-" + m.run_id();
  fs::create_directories(out_dir);
  for (auto& [suffix, content] : run.files) {
    const std::string name = base + suffix;
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + name + " in " + out_dir);
    f << content.str();
    m.outputs.push_back(name);
  }
  m.outputs.push_back(base + ".txt");
  m.summary = run.summary.str();
  {
    std::ofstream f(fs::path(out_dir) / (base + ".txt"));
    f << run.command << " (run " << m.run_id() << ", seed " << run.seed << ")\n" << m.summary;
  }
  {
    std::ofstream f(fs::path(out_dir) / (base + ".json"));
    f << m.to_json();
  }
  std::cout << run.summary.str();
  std::cout << "wrote " << (fs::path(out_dir) / (base + ".json")).string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pamlab: parabolic Anderson model experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::optional<double> mesh, tol;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--seed", seed, "root seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads (0: all cores)");
  app.add_option("--mesh", mesh, "mesh width h");
  app.add_option("--tol", tol, "numerical tolerance");
  app.add_option("--set", sets, "override section.key=value");

  auto* c_constants = app.add_subcommand("constants", "closed-form and quadrature constants");
  auto* c_eigen = app.add_subcommand("eigen", "principal Dirichlet eigenvalue sweep");
  auto* c_var = app.add_subcommand("variational", "variational problems");
  auto* c_meo = app.add_subcommand("meo", "enlargement-of-obstacles diagnostics");
  std::string meo_sub;
  c_meo->add_option("action", meo_sub, "classify | volume | enumerate")->required();
  auto* c_fk = app.add_subcommand("fk", "Feynman-Kac Monte Carlo");
  std::string fk_sub;
  c_fk->add_option("action", fk_sub, "quenched | annealed | ratio")->required();
  auto* c_exp = app.add_subcommand("exponent", "power-law exponent fit of a CSV series");
  std::string exp_input;
  c_exp->add_option("input", exp_input, "CSV with columns t, log_value");
  auto* c_accept = app.add_subcommand("accept", "acceptance suite");
  std::string suite = "";
  std::vector<std::string> only;
  c_accept->add_option("--suite", suite, "fast | full");
  c_accept->add_option("--only", only, "criteria to run, e.g. A1 A3")->delimiter(',');
  auto* c_defaults = app.add_subcommand("defaults", "print every configuration key with its default");
  auto* c_replay = app.add_subcommand("replay", "rerun a manifest");
  std::string manifest_path;
  c_replay->add_option("manifest", manifest_path, "run manifest (.json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (threads > 0) omp_set_num_threads(threads);
    if (c_defaults->parsed()) {
      std::cout << io::defaults_ini();
      return kExitOk;
    }

    Run run;
    if (c_replay->parsed()) {
      const auto m = io::Manifest::load(manifest_path);
      run.command = m.command;
      run.config = m.config;
      run.seed = m.seed;
      return execute(run, out_dir, threads);
    }

    // defaults < config file < PAMLAB_* environment < flags
    run.config = io::default_config();
    if (!config_path.empty()) {
      const auto file = io::Config::load(config_path);
      for (const auto& [k, v] : file.entries()) run.config.set(k, v);
    }
    run.config.apply_process_environment();
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      require(eq != std::string::npos && s.find('.') < eq, "--set expects section.key=value");
      run.config.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (seed) run.config.set("model.seed", std::to_string(*seed));
    if (mesh) {
      run.config.set("run.mesh", fmt("%.17g", *mesh));
      run.config.set("eigen.h", fmt("%.17g", *mesh));
    }
    if (tol) {
      run.config.set("eigen.tol", fmt("%.17g", *tol));
      run.config.set("constants.tol", fmt("%.17g", *tol));
    }
    if (threads <= 0) threads = int(run.config.get_int("run.threads", 0));
    if (threads > 0) omp_set_num_threads(threads);
    run.config.erase("run.threads");  // results do not depend on the thread count
    run.seed = run.config.get_uint("model.seed", 1);

    if (c_accept->parsed()) {
      acceptance::AcceptanceOptions ao;
      const std::string s = suite.empty() ? run.config.get_string("run.suite", "fast") : suite;
      require(s == "fast" || s == "full", "accept: suite must be fast or full");
      ao.full = s == "full";
      ao.only = only;
      const auto results = acceptance::run_acceptance(ao);
      acceptance::print_report(std::cout, results);
      return acceptance::all_pass(results) ? kExitOk : kExitFail;
    }

    if (c_constants->parsed()) run.command = "constants";
    if (c_eigen->parsed()) run.command = "eigen";
    if (c_var->parsed()) run.command = "variational";
    if (c_meo->parsed()) run.command = "meo " + meo_sub;
    if (c_fk->parsed()) run.command = "fk " + fk_sub;
    if (c_exp->parsed()) {
      run.command = "exponent";
      if (!exp_input.empty()) run.config.set("exponent.input", exp_input);
    }
    return execute(run, out_dir, threads);
  } catch (const NonConvergence& e) {
    std::cerr << "pamlab: non-convergence: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const Error& e) {
    std::cerr << "pamlab: invalid specification: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "pamlab: " << e.what() << "\n";
    return kExitFail;
  }
}
