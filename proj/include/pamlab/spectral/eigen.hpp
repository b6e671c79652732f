#pragma once

#include <span>
#include <vector>

#include "pamlab/spectral/operator.hpp"

namespace pamlab::spectral {

struct SpectralResult {
  double lambda = 0.0;
  std::vector<double> phi;  // >= 0, weighted L2 norm 1
  double residual = 0.0;    // weighted ||(H - lambda) phi||
  int iterations = 0;       // restarts summed over connected components
  bool converged = false;
  double h = 0.0;
  int dim = 0;
};

struct EigenOptions {
  double tol = 1e-8;  // residual relative to max(1, |lambda|)
  int max_iter = 200;
  int krylov_dim = 10;
  double inner_tol = 1e-12;
  /// Optional warm start (same length as the operator).
  std::span<const double> initial{};
};

/// Smallest eigenpair by restarted shift-and-invert Krylov iteration with
/// Rayleigh-Ritz extraction.  Disconnected meshes are solved per component.
/// Non-convergence is reported through `converged`, not thrown.
SpectralResult principal_eigenpair(const SchrodingerOperator& op, const EigenOptions& options = {});

/// Rayleigh quotient <x, Hx> / <x, x>.
double rayleigh_quotient(const SchrodingerOperator& op, std::span<const double> x);

}  // namespace pamlab::spectral
