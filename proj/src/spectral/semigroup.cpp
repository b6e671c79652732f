#include "pamlab/spectral/semigroup.hpp"

#include <cmath>
#include <limits>

#include "pamlab/core/error.hpp"

namespace pamlab::spectral {

std::vector<double> semigroup_evolve(const SchrodingerOperator& op, std::span<const double> initial, double t, int steps,
                                     const SemigroupOptions& opt) {
  require(t > 0.0, "semigroup_evolve: t must be positive");
  require(steps >= 1, "semigroup_evolve: steps must be >= 1");
  const std::size_t n = op.size();
  require(initial.size() == n, "semigroup_evolve: initial field has the wrong size");
  const double tau = t / steps;
  std::vector<double> u(initial.begin(), initial.end()), rhs(n), hu(n), next(n);

  auto solve = [&](double c) {
    // (I + c H) next = rhs, i.e. (H + I/c) next = rhs / c
    for (auto& v : rhs) v /= c;
    next = u;
    const auto st = solve_shifted(op, 1.0 / c, rhs, next, opt.inner_tol);
    if (!st.converged && st.residual > 1e3 * opt.inner_tol)
      throw NonConvergence("semigroup_evolve: inner linear solve did not converge");
    u.swap(next);
  };

  int first = 0;
  if (opt.rannacher_half_steps > 0) {
    const double sub = tau / opt.rannacher_half_steps;
    for (int k = 0; k < opt.rannacher_half_steps; ++k) {
      rhs = u;
      solve(sub);
    }
    first = 1;
  }
  for (int k = first; k < steps; ++k) {
    op.apply(u, hu);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = u[i] - 0.5 * tau * hu[i];
    solve(0.5 * tau);
  }
  return u;
}

double total_mass(const Mesh& mesh, std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v;
  return mesh.cell_volume() * s;
}

double semigroup_total_mass(const SchrodingerOperator& op, const Point& x0, double t, int steps,
                            const SemigroupOptions& opt) {
  const Mesh& mesh = op.mesh();
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double d = norm(mesh.position(i) - x0, mesh.dim());
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  std::vector<double> ones(op.size(), 1.0);
  return semigroup_evolve(op, ones, t, steps, opt)[best];
}

}  // namespace pamlab::spectral
