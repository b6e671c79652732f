#pragma once

#include <span>
#include <vector>

namespace pamlab::numerics {

/// Row-major symmetric matrix eigen-decomposition by cyclic Jacobi rotations.
/// Suited to the small projected problems of subspace iterations (n <= ~64).
struct SymmetricEigen {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column j (stride n) pairs with values[j]
};

SymmetricEigen jacobi_eigen(std::vector<double> a, int n, double tol = 1e-15, int max_sweeps = 100);

/// Solves a symmetric tridiagonal system in place (Thomas algorithm).
/// `diag` has n entries and `off` has n - 1 coupling entries.
/// Returns false on a vanishing pivot.
bool solve_tridiagonal(std::span<const double> diag, std::span<const double> off, std::span<double> rhs);

}  // namespace pamlab::numerics
