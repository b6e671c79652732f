#include "pamlab/variational/variational.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "pamlab/constants/constants.hpp"
#include "pamlab/core/error.hpp"
#include "pamlab/numerics/optimize.hpp"

namespace pamlab::variational {

using model::DisplacementConfig;
using model::ModelParams;
using model::Regime;
using model::SingleSitePotential;
using spectral::GridDomain;
using spectral::Mesh;

namespace {

Regime checked_regime(const ModelParams& params) {
  params.validate();
  const Regime reg = model::classify_regime(params);
  require(reg != Regime::HeavyTail && reg != Regime::NegativeU,
          "variational: needs C0 > 0 and alpha >= d + 2 (alpha >= 3 when d = 1)");
  return reg;
}

double mu_of(const ModelParams& params) {
  if (model::nearly_equal(params.alpha, params.dim + 2.0)) return 1.0;
  return constants::mu_exponent(params.dim, params.alpha);
}

double r_of_t(double t, const ModelParams& params, Regime reg) {
  const double th = params.theta;
  switch (reg) {
    case Regime::OneDimCritical:
    case Regime::OneDimLight:
      return std::pow(t, 1.0 / (3.0 + th));
    case Regime::TwoDimLog:
      return std::pow(t, 1.0 / (4.0 + th)) * std::pow(std::log(t), th / (8.0 + 2.0 * th));
    default:
      return std::pow(t, 1.0 / (params.dim + 2.0 + mu_of(params) * th));
  }
}

ScalingContext finish_context(double t, double r, const ModelParams& params, Regime reg) {
  ScalingContext c;
  c.t = t;
  c.r = r;
  c.regime = reg;
  switch (reg) {
    case Regime::OneDimCritical:
    case Regime::OneDimLight:
      c.mu = 1.0;
      c.gamma_r = 1.0;
      break;
    case Regime::TwoDimLog:
      c.mu = 1.0;
      c.gamma_r = std::sqrt((4.0 + params.theta) * std::log(r));
      break;
    default:
      c.mu = mu_of(params);
      c.gamma_r = std::pow(r, 1.0 - c.mu);
      break;
  }
  return c;
}

// Adds weight * r^2 u(r x_i - c) to V at every mesh node.
void accumulate(const Mesh& mesh, const SingleSitePotential& u, double r, const Point& c, double weight,
                std::vector<double>& V) {
  const int d = mesh.dim();
  const double w = weight * r * r;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const Point x = mesh.position(i);
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      const double z = r * x[k] - c[k];
      s += z * z;
    }
    V[i] += w * u.radial(std::sqrt(s));
  }
}

Point centre_of(const Site& q, const Site& xi) { return to_point(q + xi); }

double site_cost(const Site& xi, const ScalingContext& ctx, int d, double theta) {
  const double n = norm(xi, d);
  if (n == 0.0) return 0.0;
  return std::pow(ctx.gamma_r, theta) * std::pow(ctx.r, -double(d)) * std::pow(n / ctx.r, theta);
}

// Eigenvalue evaluator with warm starts.
class Evaluator {
 public:
  explicit Evaluator(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {}
  double lambda(const std::vector<double>& V) {
    spectral::SchrodingerOperator op(mesh_, V);
    spectral::EigenOptions eo;
    if (!warm_.empty()) eo.initial = warm_;
    auto res = spectral::principal_eigenpair(op, eo);
    if (!res.converged) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "variational: eigensolver did not converge (n = %zu, lambda = %.6g, residual = %.3g)",
                    res.phi.size(), res.lambda, res.residual);
      throw NonConvergence(buf);
    }
    ++count_;
    last_ = std::move(res);
    return last_.lambda;
  }
  void keep_warm() { warm_ = last_.phi; }
  int count() const { return count_; }
  const Mesh& mesh() const { return *mesh_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<double> warm_;
  spectral::SpectralResult last_;
  int count_ = 0;
};

// Displacements sending every site in the ball B(centre, radius) (unscaled)
// onto or beyond its boundary, radially.
std::vector<std::pair<Site, Site>> clear_ball(const DisplacementConfig& zeta, const Point& centre, double radius) {
  std::vector<std::pair<Site, Site>> out;
  const int d = zeta.dim();
  zeta.for_each([&](const Site& q, const Site& xi) {
    const Point pos = centre_of(q, xi);
    Point dir = pos - centre;
    const double dist = norm(dir, d);
    if (dist >= radius) return;
    if (dist == 0.0) {
      dir = Point{1.0, 0.0, 0.0};
    } else {
      dir = (1.0 / dist) * dir;
    }
    Site target{0, 0, 0};
    for (int k = 0; k < d; ++k) target[k] = int(std::lround(centre[k] + radius * dir[k]));
    int axis = 0;
    for (int k = 1; k < d; ++k)
      if (std::abs(dir[k]) > std::abs(dir[axis])) axis = k;
    const int step = dir[axis] >= 0.0 ? 1 : -1;
    while (norm(to_point(target) - centre, d) < radius) target[axis] += step;
    out.emplace_back(q, target - q);
  });
  return out;
}

struct State {
  DisplacementConfig zeta;
  std::vector<double> V;
  double cost = 0.0;
  double value = 0.0;
};

struct Move {
  std::vector<std::pair<Site, Site>> changes;  // (site, new xi)
  std::string label;
};

class Searcher {
 public:
  Searcher(const ScalingContext& ctx, const ModelParams& params, const OptimizerOptions& opt)
      : ctx_(ctx), params_(params), opt_(opt), u_(params) {
    domain_ = GridDomain::centred_box(params.dim, ctx.t / ctx.r, opt.nodes_per_cell);
    auto mesh = std::make_shared<const Mesh>(domain_);
    eval_ = std::make_unique<Evaluator>(mesh);
    cap_ = opt.move_cap > 0 ? opt.move_cap : int(std::ceil(ctx.r));
    moves_ = meo::capped_displacements(params.dim, cap_);
    sites_ = lambda_t_sites(params.dim, ctx.t);
    state_.zeta = DisplacementConfig::zeros(sites_);
    state_.V.assign(mesh->size(), 0.0);
    state_.zeta.for_each(
        [&](const Site& q, const Site& xi) { accumulate(*mesh, u_, ctx.r, centre_of(q, xi), 1.0, state_.V); });
    state_.cost = 0.0;
    state_.value = eval_->lambda(state_.V) + state_.cost;
    eval_->keep_warm();
    baseline_ = state_.value;
    best_ = state_;
    // Macro-move catalogue: centres at cell centres and corners, radii in steps of 1/2.
    const auto bounds = domain_.cell_bounds();
    const int d = params.dim;
    LatticeBox corners = bounds;
    for (int k = 0; k < d; ++k) corners.hi[k] += 1;
    for (std::size_t i = 0; i < corners.size(); ++i) {
      const Site c = corners.site(i);
      ball_centres_.push_back(ctx.r * to_point(c));
      bool inner = true;
      for (int k = 0; k < d; ++k) inner = inner && c[k] <= bounds.hi[k];
      if (inner) {
        Point m = to_point(c);
        for (int k = 0; k < d; ++k) m[k] += 0.5;
        ball_centres_.push_back(ctx.r * m);
      }
    }
    double half_diag = 0.0;
    for (int k = 0; k < d; ++k) half_diag += 0.25 * double(bounds.extent(k)) * double(bounds.extent(k));
    half_diag = std::sqrt(half_diag);
    for (double rho = 0.5; rho <= half_diag + 1e-12; rho += 0.5) ball_radii_.push_back(rho * ctx.r);
  }

  bool exhausted() const { return eval_->count() >= opt_.budget; }
  int evaluations() const { return eval_->count(); }
  double baseline() const { return baseline_; }
  const State& current() const { return state_; }
  const State& best() const { return best_; }
  const GridDomain& domain() const { return domain_; }
  std::vector<TraceEntry>& trace() { return trace_; }

  // Value of the configuration after `mv`; leaves the state untouched.
  double trial(const Move& mv, State& scratch) {
    scratch.V = state_.V;
    scratch.cost = state_.cost;
    const int d = params_.dim;
    for (const auto& [q, xi] : mv.changes) {
      const Site& old = state_.zeta.xi(q);
      accumulate(eval_->mesh(), u_, ctx_.r, centre_of(q, old), -1.0, scratch.V);
      accumulate(eval_->mesh(), u_, ctx_.r, centre_of(q, xi), 1.0, scratch.V);
      scratch.cost += site_cost(xi, ctx_, d, params_.theta) - site_cost(old, ctx_, d, params_.theta);
    }
    scratch.value = eval_->lambda(scratch.V) + scratch.cost;
    return scratch.value;
  }

  void accept(const Move& mv, State& scratch) {
    for (const auto& [q, xi] : mv.changes) state_.zeta.set(q, xi);
    state_.V = std::move(scratch.V);
    state_.cost = scratch.cost;
    state_.value = scratch.value;
    if (state_.value < best_.value) best_ = state_;
  }

  Move single(const Site& q, const Site& xi) const {
    Move m;
    m.changes.emplace_back(q, xi);
    m.label = "site";
    return m;
  }

  Move ball(const Point& centre, double radius) const {
    Move m;
    m.changes = clear_ball(state_.zeta, centre, radius);
    m.label = "ball";
    return m;
  }

  const std::vector<Site>& moves() const { return moves_; }
  const LatticeBox& sites() const { return sites_; }
  const std::vector<Point>& ball_centres() const { return ball_centres_; }
  const std::vector<double>& ball_radii() const { return ball_radii_; }
  void keep_warm() { eval_->keep_warm(); }

 private:
  ScalingContext ctx_;
  ModelParams params_;
  OptimizerOptions opt_;
  SingleSitePotential u_;
  GridDomain domain_;
  std::unique_ptr<Evaluator> eval_;
  int cap_ = 1;
  std::vector<Site> moves_;
  LatticeBox sites_;
  State state_;
  State best_;
  double baseline_ = 0.0;
  std::vector<Point> ball_centres_;
  std::vector<double> ball_radii_;
  std::vector<TraceEntry> trace_;
};

void log_step(Searcher& s, double value, bool accepted, const std::string& label) {
  TraceEntry e;
  e.evaluation = s.evaluations();
  e.value = value;
  e.best = s.best().value;
  e.accepted = accepted;
  e.move = label;
  s.trace().push_back(std::move(e));
}

void run_greedy(Searcher& s, const OptimizerOptions& opt, Rng& rng, bool shuffle) {
  State scratch;
  std::vector<Site> order;
  for (std::size_t i = 0; i < s.sites().size(); ++i) order.push_back(s.sites().site(i));
  bool improved = true;
  while (improved && !s.exhausted()) {
    improved = false;
    if (opt.macro_moves) {
      Move best_move;
      double best_value = s.current().value;
      for (const auto& c : s.ball_centres()) {
        for (double rad : s.ball_radii()) {
          if (s.exhausted()) break;
          Move mv = s.ball(c, rad);
          if (mv.changes.empty()) continue;
          const double v = s.trial(mv, scratch);
          if (v < best_value) {
            best_value = v;
            best_move = std::move(mv);
          }
        }
      }
      if (!best_move.changes.empty()) {
        s.trial(best_move, scratch);
        s.accept(best_move, scratch);
        s.keep_warm();
        log_step(s, s.current().value, true, "ball");
        improved = true;
      }
    }
    if (shuffle) std::shuffle(order.begin(), order.end(), rng);
    for (const Site& q : order) {
      if (s.exhausted()) break;
      const Site cur = s.current().zeta.xi(q);
      double best_value = s.current().value;
      Site best_xi = cur;
      for (const Site& p : s.moves()) {
        if (p == cur) continue;
        if (s.exhausted()) break;
        const double v = s.trial(s.single(q, p), scratch);
        if (v < best_value) {
          best_value = v;
          best_xi = p;
        }
      }
      if (best_xi != cur) {
        const Move mv = s.single(q, best_xi);
        s.trial(mv, scratch);
        s.accept(mv, scratch);
        s.keep_warm();
        log_step(s, s.current().value, true, "site");
        improved = true;
      }
    }
  }
}

void run_annealing(Searcher& s, const OptimizerOptions& opt, Rng& rng) {
  State scratch;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t n_sites = s.sites().size();
  const double base = s.baseline();
  double T = opt.initial_temperature_fraction * (base != 0.0 ? std::abs(base) : 1.0);
  while (!s.exhausted()) {
    for (std::size_t k = 0; k < n_sites && !s.exhausted(); ++k) {
      Move mv;
      if (opt.macro_moves && unif(rng) < opt.macro_probability) {
        const auto& cs = s.ball_centres();
        const auto& rs = s.ball_radii();
        mv = s.ball(cs[std::size_t(unif(rng) * double(cs.size())) % cs.size()],
                    rs[std::size_t(unif(rng) * double(rs.size())) % rs.size()]);
        if (mv.changes.empty()) continue;
      } else {
        const Site q = s.sites().site(std::size_t(unif(rng) * double(n_sites)) % n_sites);
        const auto& ms = s.moves();
        const Site p = ms[std::size_t(unif(rng) * double(ms.size())) % ms.size()];
        if (p == s.current().zeta.xi(q)) continue;
        mv = s.single(q, p);
      }
      const double v = s.trial(mv, scratch);
      const double delta = v - s.current().value;
      const bool ok = delta < 0.0 || (T > 0.0 && unif(rng) < std::exp(-delta / T));
      if (ok) {
        s.accept(mv, scratch);
        s.keep_warm();
      }
      log_step(s, s.current().value, ok, mv.label);
    }
    T *= opt.cooling;
  }
}

}  // namespace

ScalingContext scaling_context(double t, const ModelParams& params) {
  const Regime reg = checked_regime(params);
  require(t > std::numbers::e, "scaling_context: requires t > e");
  return finish_context(t, r_of_t(t, params, reg), params, reg);
}

ScalingContext context_for_scale(double r, const ModelParams& params) {
  const Regime reg = checked_regime(params);
  require(r > 1.0, "context_for_scale: requires r > 1");
  // r(t) is increasing for t > e; bracket and bisect in log t.
  double lo = std::log(std::numbers::e * (1.0 + 1e-12));
  double hi = lo;
  while (r_of_t(std::exp(hi), params, reg) < r) hi = 2.0 * hi + 1.0;
  if (r_of_t(std::exp(lo), params, reg) >= r) return finish_context(std::exp(lo), r, params, reg);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (r_of_t(std::exp(mid), params, reg) < r ? lo : hi) = mid;
  }
  return finish_context(std::exp(0.5 * (lo + hi)), r, params, reg);
}

ScalingContext moment_context(double t, double p, const ModelParams& params) {
  require(p > 0.0, "moment_context: requires p > 0");
  ScalingContext c = scaling_context(p * t, params);
  c.p = p;
  return c;
}

LatticeBox lambda_t_sites(int dim, double t) {
  require(t >= 0.0, "lambda_t_sites: requires t >= 0");
  const int h = int(std::floor(t / 2.0));
  return LatticeBox::cube(dim, -h, h);
}

double cost_term(const DisplacementConfig& zeta, const ScalingContext& ctx, double theta) {
  double s = 0.0;
  const int d = zeta.dim();
  zeta.for_each([&](const Site&, const Site& xi) { s += site_cost(xi, ctx, d, theta); });
  return s;
}

VariationalSolution functional_value(const DisplacementConfig& zeta, const ScalingContext& ctx,
                                     const ModelParams& params, const GridDomain& domain,
                                     const spectral::EigenOptions& eig) {
  params.validate();
  require(zeta.dim() == params.dim && domain.dim == params.dim, "functional_value: dimension mismatch");
  const SingleSitePotential u(params);
  auto mesh = std::make_shared<const Mesh>(domain);
  std::vector<double> V(mesh->size(), 0.0);
  zeta.for_each([&](const Site& q, const Site& xi) { accumulate(*mesh, u, ctx.r, centre_of(q, xi), 1.0, V); });
  spectral::SchrodingerOperator op(mesh, std::move(V));
  VariationalSolution out;
  out.eig = spectral::principal_eigenpair(op, eig);
  if (!out.eig.converged) throw NonConvergence("functional_value: eigensolver did not converge");
  out.config = zeta;
  out.domain = domain;
  out.lambda = out.eig.lambda;
  out.cost = cost_term(zeta, ctx, params.theta);
  out.value = out.lambda + out.cost;
  out.evaluations = 1;
  return out;
}

std::string to_string(Optimizer o) { return o == Optimizer::Greedy ? "greedy" : "annealing"; }

Optimizer parse_optimizer(const std::string& name) {
  if (name == "greedy") return Optimizer::Greedy;
  if (name == "annealing" || name == "anneal") return Optimizer::Annealing;
  throw InvalidArgument("unknown optimizer '" + name + "'");
}

VariationalSolution minimize_functional(const ScalingContext& ctx, const ModelParams& params,
                                        const OptimizerOptions& options) {
  checked_regime(params);
  require(options.budget >= 1, "minimize_functional: budget must be positive");
  require(options.nodes_per_cell >= 2, "minimize_functional: needs at least 2 nodes per cell");
  require(options.restarts >= 1, "minimize_functional: restarts must be positive");
  require(options.cooling > 0.0 && options.cooling < 1.0, "minimize_functional: cooling must lie in (0, 1)");

  const int R = options.restarts;
  std::vector<VariationalSolution> results(static_cast<std::size_t>(R));
  std::vector<std::string> errors(static_cast<std::size_t>(R));
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < R; ++k) {
    try {
      Searcher s(ctx, params, options);
      Rng rng = derive_stream(options.seed, std::uint64_t(k));
      log_step(s, s.current().value, true, "baseline");
      if (options.method == Optimizer::Greedy)
        run_greedy(s, options, rng, k > 0);
      else
        run_annealing(s, options, rng);
      auto& out = results[std::size_t(k)];
      const State& b = s.best();
      out = functional_value(b.zeta, ctx, params, s.domain());
      out.trace = std::move(s.trace());
      out.evaluations = s.evaluations();
      out.budget_exhausted = s.exhausted();
      out.optimizer = to_string(options.method);
      out.seed = options.seed;
    } catch (const std::exception& e) {
      errors[std::size_t(k)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw NonConvergence("minimize_functional: " + e);
  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k)
    if (results[k].value < results[best].value) best = k;
  return std::move(results[best]);
}

double expulsion_cost(int m, int n, double r, double theta) {
  double s = 0.0;
  for (int q = m + 1; q < n; ++q) s += std::pow(double(std::min(q - m, n - q)), theta);
  return s / std::pow(r, 1.0 + theta);
}

namespace {

struct IntervalState {
  int m = 0, n = 0;
  std::vector<int> sites;    // halo sites in increasing order
  std::vector<int> centres;  // q + zeta_q
  std::vector<double> V;
  double cost = 0.0;
  double lambda = 0.0;
  double value = 0.0;
};

double interval_site_cost(int q, int c, const ScalingContext& ctx, double theta) {
  const int z = std::abs(c - q);
  if (z == 0) return 0.0;
  return std::pow(ctx.gamma_r, theta) * std::pow(double(z) / ctx.r, theta) / ctx.r;
}

}  // namespace

VariationalSolution minimize_interval_1d(const ScalingContext& ctx, const ModelParams& params,
                                         const IntervalOptions& opt) {
  checked_regime(params);
  require(params.dim == 1, "minimize_interval_1d: d = 1 only");
  require(opt.nodes_per_cell >= 2, "minimize_interval_1d: needs at least 2 nodes per lattice spacing");
  require(opt.halo > 0.0 && opt.max_length > 0.0, "minimize_interval_1d: halo and max_length must be positive");
  const double r = ctx.r;
  const double th = params.theta;
  const int s = opt.nodes_per_cell;
  const SingleSitePotential u(params);
  const double g_th = std::pow(ctx.gamma_r, th);
  const int L_max = std::max(1, int(std::floor(opt.max_length * r)));
  const double lr = opt.halo * r;

  auto build = [&](int L) {
    IntervalState st;
    st.m = -(L / 2);
    st.n = st.m + L;
    const int q_lo = int(std::floor(st.m - lr)) + 1;
    const int q_hi = int(std::ceil(st.n + lr)) - 1;
    for (int q = q_lo; q <= q_hi; ++q) {
      if (!(q > st.m - lr && q < st.n + lr)) continue;
      int c = q;
      if (q > st.m && q < st.n) c = (q - st.m <= st.n - q) ? st.m : st.n;
      st.sites.push_back(q);
      st.centres.push_back(c);
      st.cost += interval_site_cost(q, c, ctx, th);
    }
    return st;
  };

  struct Scored {
    int L;
    double value;
  };
  std::vector<Scored> scored;
  double best = HUGE_VAL;
  int evaluations = 0;
  for (int L = 1; L <= L_max; ++L) {
    const int m = -(L / 2);
    const double least = g_th * expulsion_cost(m, m + L, r, th);
    if (least >= best) break;
    const double N = double(L) * s;
    const double h = 1.0 / (r * s);
    const double free_lambda = (1.0 - std::cos(std::numbers::pi / N)) / (h * h);
    if (least + free_lambda >= best) continue;
    IntervalState st = build(L);
    auto dom = GridDomain::box(1, Site{m, 0, 0}, Site{m + L - 1, 0, 0}, s, 1.0 / r);
    auto mesh = std::make_shared<const Mesh>(dom);
    std::vector<double> V(mesh->size(), 0.0);
    for (int c : st.centres) accumulate(*mesh, u, r, Point{double(c), 0.0, 0.0}, 1.0, V);
    Evaluator ev(mesh);
    const double value = ev.lambda(V) + st.cost;
    ++evaluations;
    scored.push_back({L, value});
    best = std::min(best, value);
  }
  require(!scored.empty(), "minimize_interval_1d: no admissible interval");
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    return a.value < b.value || (a.value == b.value && a.L < b.L);
  });

  const std::size_t n_refine = opt.refine_exterior ? std::min<std::size_t>(scored.size(), std::size_t(std::max(1, opt.refine_candidates))) : 1;
  IntervalState winner;
  winner.value = HUGE_VAL;
  for (std::size_t k = 0; k < n_refine; ++k) {
    IntervalState st = build(scored[k].L);
    const int L = scored[k].L;
    auto dom = GridDomain::box(1, Site{st.m, 0, 0}, Site{st.m + L - 1, 0, 0}, s, 1.0 / r);
    auto mesh = std::make_shared<const Mesh>(dom);
    Evaluator ev(mesh);
    st.V.assign(mesh->size(), 0.0);
    for (int c : st.centres) accumulate(*mesh, u, r, Point{double(c), 0.0, 0.0}, 1.0, st.V);
    st.lambda = ev.lambda(st.V);
    ev.keep_warm();
    st.value = st.lambda + st.cost;
    if (opt.refine_exterior) {
      // Sites outside (m, n) in order of distance to the interval edge.
      std::vector<std::size_t> order(st.sites.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      auto edge_dist = [&](std::size_t i) {
        const int c = st.centres[i];
        return c <= st.m ? st.m - c : c - st.n;
      };
      bool improved = true;
      for (int pass = 0; improved && pass < 64; ++pass) {
        improved = false;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return edge_dist(a) < edge_dist(b); });
        for (std::size_t i : order) {
          for (;;) {
            const int c = st.centres[i];
            const int step = c <= st.m ? -1 : 1;
            const int q = st.sites[i];
            std::vector<double> V = st.V;
            accumulate(*mesh, u, r, Point{double(c), 0.0, 0.0}, -1.0, V);
            accumulate(*mesh, u, r, Point{double(c + step), 0.0, 0.0}, 1.0, V);
            const double cost = st.cost - interval_site_cost(q, c, ctx, th) + interval_site_cost(q, c + step, ctx, th);
            const double lam = ev.lambda(V);
            if (lam + cost < st.value) {
              ev.keep_warm();
              st.V = std::move(V);
              st.cost = cost;
              st.lambda = lam;
              st.value = lam + cost;
              st.centres[i] = c + step;
              improved = true;
            } else {
              break;
            }
          }
        }
      }
      evaluations += ev.count();
    }
    if (st.value < winner.value) winner = std::move(st);
  }

  // Final solve for the reported eigenpair.
  const int L = winner.n - winner.m;
  auto dom = GridDomain::box(1, Site{winner.m, 0, 0}, Site{winner.m + L - 1, 0, 0}, s, 1.0 / r);
  auto mesh = std::make_shared<const Mesh>(dom);
  spectral::SchrodingerOperator op(mesh, winner.V);
  VariationalSolution out;
  out.eig = spectral::principal_eigenpair(op);
  if (!out.eig.converged) throw NonConvergence("minimize_interval_1d: eigensolver did not converge");
  out.domain = dom;
  out.config = DisplacementConfig::empty(LatticeBox::cube(1, winner.sites.front(), winner.sites.back()));
  for (std::size_t i = 0; i < winner.sites.size(); ++i)
    out.config.set(Site{winner.sites[i], 0, 0}, Site{winner.centres[i] - winner.sites[i], 0, 0});
  out.lambda = out.eig.lambda;
  out.cost = winner.cost;
  out.value = out.lambda + out.cost;
  out.evaluations = evaluations + 1;
  out.optimizer = "interval";
  out.interval_m = winner.m;
  out.interval_n = winner.n;
  return out;
}

double continuum_profile(double ell, double theta) {
  require(ell > 0.0 && theta > 0.0, "continuum_profile: requires ell > 0 and theta > 0");
  return std::numbers::pi * std::numbers::pi / (2.0 * ell * ell) +
         std::pow(ell, 1.0 + theta) / (std::pow(2.0, theta) * (1.0 + theta));
}

ContinuumMinimum minimize_continuum_profile(double theta) {
  require(theta > 0.0, "minimize_continuum_profile: requires theta > 0");
  // f is convex in ell; bracket generously around the stationary scale.
  auto f = [&](double l) { return continuum_profile(l, theta); };
  const auto m = numerics::golden_section(f, 1e-3, 100.0, 1e-13);
  return {m.x, m.value};
}

FormComparison compare_variational_forms(const ScalingContext& ctx, const ModelParams& params,
                                         const CompareCaps& caps) {
  checked_regime(params);
  require(caps.nodes_per_cell >= 2, "compare_variational_forms: needs at least 2 nodes per cell");
  const int d = params.dim;
  const double th = params.theta;
  const SingleSitePotential u(params);
  FormComparison out;

  // Full-box form: odometer over capped zeta on Lambda_t.
  const auto moves = meo::capped_displacements(d, caps.displacement_cap);
  const LatticeBox sites = lambda_t_sites(d, ctx.t);
  const std::size_t n_sites = sites.size();
  const long double total = std::pow((long double)moves.size(), (long double)n_sites);
  if (total > (long double)caps.work_bound)
    throw WorkBoundExceeded("compare_variational_forms: full-box search exceeds the work bound");
  const auto lambda_dom = GridDomain::centred_box(d, ctx.t / ctx.r, caps.nodes_per_cell);
  {
    auto mesh = std::make_shared<const Mesh>(lambda_dom);
    Evaluator ev(mesh);
    std::vector<std::size_t> digit(n_sites, 0);
    std::vector<double> V(mesh->size(), 0.0);
    double cost = 0.0;
    for (std::size_t i = 0; i < n_sites; ++i) {
      const Site q = sites.site(i);
      accumulate(*mesh, u, ctx.r, centre_of(q, moves[0]), 1.0, V);
      cost += site_cost(moves[0], ctx, d, th);
    }
    double best = HUGE_VAL;
    std::uint64_t count = 0;
    for (;;) {
      best = std::min(best, ev.lambda(V) + cost);
      ++count;
      std::size_t i = 0;
      while (i < n_sites && digit[i] + 1 == moves.size()) {
        const Site q = sites.site(i);
        accumulate(*mesh, u, ctx.r, centre_of(q, moves[digit[i]]), -1.0, V);
        accumulate(*mesh, u, ctx.r, centre_of(q, moves[0]), 1.0, V);
        cost += site_cost(moves[0], ctx, d, th) - site_cost(moves[digit[i]], ctx, d, th);
        digit[i] = 0;
        ++i;
      }
      if (i == n_sites) break;
      const Site q = sites.site(i);
      accumulate(*mesh, u, ctx.r, centre_of(q, moves[digit[i]]), -1.0, V);
      accumulate(*mesh, u, ctx.r, centre_of(q, moves[digit[i] + 1]), 1.0, V);
      cost += site_cost(moves[digit[i] + 1], ctx, d, th) - site_cost(moves[digit[i]], ctx, d, th);
      ++digit[i];
    }
    out.full_infimum = best;
    out.full_configs = count;
  }

  // Relevant form: potential from the halo sites of each animal.
  meo::RelevantCaps rc;
  rc.dim = d;
  rc.max_cells = caps.max_cells;
  rc.displacement_cap = caps.displacement_cap;
  rc.halo = caps.halo;
  rc.work_bound = caps.work_bound;
  meo::RelevantEnumerator en(ctx.r, ctx.t, rc);
  meo::RelevantPair pair;
  std::vector<Site> cur_animal;
  std::unique_ptr<Evaluator> ev;
  double best = HUGE_VAL;
  while (en.next(pair)) {
    if (!ev || pair.animal != cur_animal) {
      cur_animal = pair.animal;
      auto dom = GridDomain::from_cells(d, cur_animal, caps.nodes_per_cell);
      ev = std::make_unique<Evaluator>(std::make_shared<const Mesh>(dom));
    }
    std::vector<double> V(ev->mesh().size(), 0.0);
    double cost = 0.0;
    for (std::size_t i = 0; i < pair.halo_sites.size(); ++i) {
      accumulate(ev->mesh(), u, ctx.r, centre_of(pair.halo_sites[i], pair.zeta[i]), 1.0, V);
      cost += site_cost(pair.zeta[i], ctx, d, th);
    }
    const double v = ev->lambda(V) + cost;
    ++out.relevant_pairs;
    if (v < best) {
      best = v;
      out.best_animal = pair.animal;
    }
  }
  out.relevant_infimum = best;
  out.ratio = out.relevant_infimum / out.full_infimum;
  out.epsilon = std::abs(out.ratio - 1.0);
  return out;
}

void write_solution_csv_header(std::ostream& os) {
  os << "# schema=v1\n";
  os << "t,r,regime,optimizer,value,lambda_term,cost_term,seed,iterations\n";
}

void write_solution_csv_row(std::ostream& os, const ScalingContext& ctx, const VariationalSolution& s) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%s,%.17g,%.17g,%.17g,%llu,%d\n", ctx.t, ctx.r,
                model::to_string(ctx.regime).c_str(), s.optimizer.c_str(), s.value, s.lambda, s.cost,
                (unsigned long long)s.seed, s.evaluations);
  os << buf;
}

std::string solution_json(const ScalingContext& ctx, const VariationalSolution& s) {
  nlohmann::json j;
  j["schema"] = "v1";
  j["t"] = ctx.t;
  j["r"] = ctx.r;
  j["gamma_r"] = ctx.gamma_r;
  j["regime"] = model::to_string(ctx.regime);
  j["optimizer"] = s.optimizer;
  j["value"] = s.value;
  j["lambda_term"] = s.lambda;
  j["cost_term"] = s.cost;
  j["evaluations"] = s.evaluations;
  j["budget_exhausted"] = s.budget_exhausted;
  const int d = s.domain.dim;
  auto cells = nlohmann::json::array();
  for (const auto& c : s.domain.cells) cells.push_back(std::vector<int>(c.begin(), c.begin() + d));
  j["domain"] = {{"cell_size", s.domain.cell_size}, {"nodes_per_cell", s.domain.nodes_per_cell}, {"cells", cells}};
  auto zeta = nlohmann::json::array();
  s.config.for_each([&](const Site& q, const Site& xi) {
    if (norm2(xi, d) == 0) return;
    zeta.push_back({{"q", std::vector<int>(q.begin(), q.begin() + d)}, {"zeta", std::vector<int>(xi.begin(), xi.begin() + d)}});
  });
  j["zeta"] = zeta;
  if (s.interval_n != s.interval_m) j["interval"] = {s.interval_m, s.interval_n};
  return j.dump(2);
}

}  // namespace pamlab::variational
