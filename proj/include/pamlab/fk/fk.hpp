#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "pamlab/model/displacement.hpp"
#include "pamlab/model/params.hpp"
#include "pamlab/model/potential.hpp"
#include "pamlab/numerics/stats.hpp"

namespace pamlab::fk {

enum class Integrator { LeftPoint, Trapezoid };

/// Start-point handling: a fixed x0, x0 uniform on Lambda_1 = (-1/2, 1/2)^d
/// per environment, or the average of v^p over a deterministic grid on Lambda_1.
enum class StartMode { Fixed, Uniform, Grid };

struct PathEstimator {
  int dim = 1;
  double t = 1.0;
  double dt = 0.0;  // 0 means t / 1024
  std::size_t n_paths = 1000;
  Point x0{0.0, 0.0, 0.0};
  Integrator integrator = Integrator::LeftPoint;
  StartMode start = StartMode::Fixed;
  int grid_per_axis = 4;  // StartMode::Grid: cell-centred points per axis

  /// Throws InvalidArgument unless dt divides t and n_paths >= 1.
  void validate() const;
  double step() const { return dt > 0.0 ? dt : t / 1024.0; }
  std::size_t steps() const;
  /// Half-width 6 sqrt(t d) of the box paths must stay in.
  double reach() const;
};

struct MassEstimate {
  double estimate = 0.0;
  double std_err = 0.0;
  std::size_t n_paths = 0;
  std::size_t steps = 0;
};

/// Paths come in blocks of this size; block b of environment e uses the
/// stream derive_stream(seed, e, b).
inline constexpr std::size_t kPathBlock = 64;

/// Monte Carlo mean of exp(-int_0^t V(B_s) ds) with B_0 = est.x0, parallel
/// over path blocks with a deterministic pairwise reduction.  Throws
/// CoverageError when a path leaves the region where V is defined.
MassEstimate quenched_mass(const model::PotentialField& V, const PathEstimator& est, std::uint64_t seed,
                           std::uint64_t env_index = 0);
/// Sequential reference for quenched_mass (identical streams and result).
MassEstimate quenched_mass_serial(const model::PotentialField& V, const PathEstimator& est, std::uint64_t seed,
                                  std::uint64_t env_index = 0);

struct FkOptions {
  double trunc_radius = 0.0;     // 0: default_trunc_radius(u)
  double table_spacing = 0.0;    // 0: 1/64, coarsened to keep the table below max_table
  std::size_t max_table = 4'000'000;
  /// Environments larger than this many sites, or tabulations costing more
  /// than work_bound site evaluations, throw WorkBoundExceeded.
  std::size_t max_sites = 20'000'000;
  double work_bound = 2e10;
  bool zero_displacements = false;  // deterministic environment xi = 0
  bool shared_paths = false;        // the same path streams in every environment
};

/// Sites an environment must carry for paths started in [lo, hi] (per axis):
/// the reach box enlarged by the truncation radius.  In d >= 2 the certified
/// default radius is large; set FkOptions::trunc_radius for practical runs.
LatticeBox environment_box(const model::ModelParams& params, const PathEstimator& est, double trunc_radius);

/// Tabulated potential of `config` over the reach box of `est`.
std::unique_ptr<model::TabulatedPotential> environment_field(const model::ModelParams& params,
                                                             const model::DisplacementConfig& config,
                                                             const PathEstimator& est, const FkOptions& opt = {});

/// quenched_mass for a configuration: tabulates its potential over the reach
/// box.  Throws CoverageError unless the configuration covers environment_box.
MassEstimate quenched_mass(const model::DisplacementConfig& config, const model::ModelParams& params,
                           const PathEstimator& est, std::uint64_t seed, const FkOptions& opt = {});

/// Environment e of root seed `seed` on environment_box(params, est, R):
/// the stream derive_stream(seed ^ env salt, e), or xi = 0 when
/// opt.zero_displacements.
model::DisplacementConfig sample_environment(const model::ModelParams& params, const PathEstimator& est,
                                             std::uint64_t seed, std::uint64_t env, const FkOptions& opt = {});

struct MomentEstimate {
  double p = 1.0;
  double mean = 0.0;     // (1/n_env) sum of v_e^p
  double std_err = 0.0;  // sample stddev / sqrt(n_env)
  std::size_t n_env = 0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

struct MomentSample {
  std::vector<double> masses;  // per environment; Grid mode holds per-env means of v
  /// per environment and order: v_e^p, or the grid average of v^p in Grid mode
  std::vector<std::vector<double>> powers;
  std::vector<MomentEstimate> moments;
};

/// Environments e = 0..n_env-1 drawn from derive_stream(seed ^ env salt, e)
/// on environment_box; the same path functionals serve every order p.
MomentSample annealed_sample(const model::ModelParams& params, const std::vector<double>& ps, std::size_t n_env,
                             const PathEstimator& est, std::uint64_t seed, const FkOptions& opt = {});
MomentEstimate annealed_moment(const model::ModelParams& params, double p, std::size_t n_env,
                               const PathEstimator& est, std::uint64_t seed, const FkOptions& opt = {});

struct RatioEstimate {
  double ratio = 1.0;  // E[v^p2]^(1/p2) / E[v^p1]^(1/p1)
  numerics::Interval ci;
  bool degenerate = false;  // all per-environment values equal; ci collapsed
  std::size_t n_boot = 0;
};

/// Percentile bootstrap over environments; replicate b resamples with
/// derive_stream(seed, boot salt, b).
RatioEstimate ratio_from_sample(const MomentSample& s, std::size_t i1, std::size_t i2, double p1, double p2,
                                std::size_t n_boot, std::uint64_t seed, double level = 0.95);
RatioEstimate intermittency_ratio(const model::ModelParams& params, double p1, double p2, std::size_t n_env,
                                  const PathEstimator& est, std::uint64_t seed, std::size_t n_boot = 2000,
                                  double level = 0.95, const FkOptions& opt = {});

struct ExponentFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t points = 0;
};

/// Least squares of log|log_value| on log t.  Needs >= 4 points with t > 0
/// and log values of one strict sign; a constant series is rejected.
ExponentFit exponent_fit(const std::vector<std::pair<double, double>>& series);

/// CSV row schema: t,p,mean,std_err,n_env,n_paths,dt,seed,regime.
void write_moment_csv_header(std::ostream& os);
void write_moment_csv_row(std::ostream& os, const model::ModelParams& params, const PathEstimator& est,
                          const MomentEstimate& m);

}  // namespace pamlab::fk
