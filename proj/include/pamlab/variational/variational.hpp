#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pamlab/meo/meo.hpp"
#include "pamlab/model/displacement.hpp"
#include "pamlab/model/params.hpp"
#include "pamlab/spectral/eigen.hpp"

namespace pamlab::variational {

struct ScalingContext {
  double t = 0.0;
  double r = 1.0;
  double gamma_r = 1.0;
  double mu = 1.0;
  model::Regime regime = model::Regime::OneDimCritical;
  double p = 1.0;  // moment order when built by moment_context
};

/// Spatial scale r(t) and cost scale gamma(r) of the regime of (d, alpha):
///   d = 1, alpha >= 3:                    r = t^(1/(3+theta)), gamma = 1
///   d = 2, alpha > 4:                     r = t^(1/(4+theta)) (log t)^(theta/(8+2 theta)),
///                                         gamma = sqrt((4 + theta) log r)
///   d >= 3, alpha >= d + 2, or (2, 4):    r = t^(1/(d+2+mu theta)), gamma = r^(1-mu)
/// The d = 1, alpha > 3 row evaluates the one-dimensional functional outside
/// the range where it is known to represent the moments.  Requires t > e.
ScalingContext scaling_context(double t, const model::ModelParams& params);

/// The context whose spatial scale equals r (inverting r(t)).
ScalingContext context_for_scale(double r, const model::ModelParams& params);

/// scaling_context(p t): the substitution used for p-th moments.
ScalingContext moment_context(double t, double p, const model::ModelParams& params);

/// Lambda_t intersected with Z^d: sites with |q_i| <= floor(t/2).
LatticeBox lambda_t_sites(int dim, double t);

/// gamma(r)^theta sum_q r^-d |zeta_q / r|^theta.
double cost_term(const model::DisplacementConfig& zeta, const ScalingContext& ctx, double theta);

struct TraceEntry {
  int evaluation = 0;
  double value = 0.0;  // value of the current (accepted) configuration
  double best = 0.0;   // running minimum
  bool accepted = false;
  std::string move;
};

struct VariationalSolution {
  model::DisplacementConfig config;
  spectral::GridDomain domain;
  double value = 0.0;
  double lambda = 0.0;
  double cost = 0.0;
  spectral::SpectralResult eig;
  std::vector<TraceEntry> trace;
  int evaluations = 0;
  bool budget_exhausted = false;  // stopped on the eigensolve budget
  std::string optimizer;
  std::uint64_t seed = 0;
  int interval_m = 0;  // d = 1 interval form: (m/r, n/r)
  int interval_n = 0;
};

/// lambda of H = -1/2 Delta + sum_q r^2 u(r x - q - zeta_q) on `domain` (the
/// sum runs over every present site) plus cost_term.
VariationalSolution functional_value(const model::DisplacementConfig& zeta, const ScalingContext& ctx,
                                     const model::ModelParams& params, const spectral::GridDomain& domain,
                                     const spectral::EigenOptions& eig = {});

enum class Optimizer { Greedy, Annealing };
std::string to_string(Optimizer o);
Optimizer parse_optimizer(const std::string& name);

struct OptimizerOptions {
  Optimizer method = Optimizer::Greedy;
  int budget = 2000;          // eigensolves per restart
  int nodes_per_cell = 8;     // mesh on the unit cells of Lambda_{t/r}
  int move_cap = 0;           // single-site |zeta_q| cap; 0 means ceil(r)
  bool macro_moves = true;    // clear-a-ball moves
  double macro_probability = 0.1;
  double initial_temperature_fraction = 0.1;  // T0 = fraction * value(zeta = 0)
  double cooling = 0.95;                      // per sweep
  int restarts = 1;
  std::uint64_t seed = 1;
};

/// Approximate infimum of the functional over zeta on Lambda_t with domain
/// Lambda_{t/r}.  The result never exceeds the zeta = 0 baseline; the trace
/// is the accepted-move log (greedy) or the chain with running best.
VariationalSolution minimize_functional(const ScalingContext& ctx, const model::ModelParams& params,
                                        const OptimizerOptions& options);

struct IntervalOptions {
  double halo = 4.0;           // l
  int nodes_per_cell = 4;      // nodes per lattice spacing 1/r; h = 1/(r s)
  double max_length = 8.0;     // hard cap on (n - m)/r
  bool refine_exterior = true;  // greedy outward moves of points outside (m, n)
  int refine_candidates = 3;    // interval lengths refined greedily
};

/// Minimum of lambda_zeta((m/r, n/r)) + sum_{q in (m - lr, n + lr)} r^-1 |zeta_q/r|^theta
/// over interval lengths n - m, interior points expelled to the nearest
/// endpoint.  Lengths are pruned exactly: the search stops once the least
/// expulsion cost alone reaches the best value, and skips lengths whose cost
/// plus free Dirichlet eigenvalue cannot beat it.  d = 1 only.
VariationalSolution minimize_interval_1d(const ScalingContext& ctx, const model::ModelParams& params,
                                         const IntervalOptions& options = {});

/// sum_{m < q < n} min(q - m, n - q)^theta / r^(1+theta).
double expulsion_cost(int m, int n, double r, double theta);

/// f(ell) = pi^2 / (2 ell^2) + ell^(1+theta) / (2^theta (1 + theta)).
double continuum_profile(double ell, double theta);

struct ContinuumMinimum {
  double ell = 0.0;
  double value = 0.0;
};
ContinuumMinimum minimize_continuum_profile(double theta);

struct CompareCaps {
  int max_cells = 2;
  int displacement_cap = 1;
  double halo = 1.0;
  int nodes_per_cell = 16;
  std::uint64_t work_bound = 2'000'000;
};

struct FormComparison {
  double relevant_infimum = 0.0;  // over (R, zeta) in the relevant set
  double full_infimum = 0.0;      // over zeta in Omega_t (capped)
  double ratio = 0.0;             // relevant / full
  double epsilon = 0.0;           // |ratio - 1|
  std::uint64_t relevant_pairs = 0;
  std::uint64_t full_configs = 0;
  std::vector<Site> best_animal;
};

/// Exhaustive toy-scale comparison of the lattice-animal form (potential from
/// halo sites within Lambda_t) and the full-box form on Lambda_{t/r}.
FormComparison compare_variational_forms(const ScalingContext& ctx, const model::ModelParams& params,
                                         const CompareCaps& caps);

/// CSV row schema: t,r,regime,optimizer,value,lambda_term,cost_term,seed,iterations.
void write_solution_csv_header(std::ostream& os);
void write_solution_csv_row(std::ostream& os, const ScalingContext& ctx, const VariationalSolution& s);
/// JSON dump of the domain cells and the zeta map (nonzero entries).
std::string solution_json(const ScalingContext& ctx, const VariationalSolution& s);

}  // namespace pamlab::variational
