#pragma once

#include <span>
#include <vector>

#include "pamlab/spectral/operator.hpp"

namespace pamlab::spectral {

struct SemigroupOptions {
  /// Backward-Euler half steps replacing the first Crank-Nicolson step, to
  /// damp stiff modes of non-smooth data.
  int rannacher_half_steps = 2;
  double inner_tol = 1e-13;
};

/// u(t) = exp(-t H) u0 by Crank-Nicolson with `steps` uniform steps.
std::vector<double> semigroup_evolve(const SchrodingerOperator& op, std::span<const double> initial, double t, int steps,
                                     const SemigroupOptions& options = {});

/// h^d sum u_i.
double total_mass(const Mesh& mesh, std::span<const double> u);

/// (exp(-t H) 1)(x0) at the node nearest x0: the Dirichlet-killed
/// Feynman-Kac total mass on the mesh, by symmetry of H.
double semigroup_total_mass(const SchrodingerOperator& op, const Point& x0, double t, int steps,
                            const SemigroupOptions& options = {});

}  // namespace pamlab::spectral
