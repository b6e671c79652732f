#include "pamlab/numerics/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pamlab::numerics {

SymmetricEigen jacobi_eigen(std::vector<double> a, int n, double tol, int max_sweeps) {
  std::vector<double> v(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[std::size_t(i) * n + i] = 1.0;
  auto at = [&](int i, int j) -> double& { return a[std::size_t(i) * n + j]; };

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    double diag = 0.0;
    for (int i = 0; i < n; ++i) {
      diag += at(i, i) * at(i, i);
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    }
    if (off <= tol * tol * std::max(diag, 1e-300)) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double tau = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v[std::size_t(k) * n + p];
          const double vkq = v[std::size_t(k) * n + q];
          v[std::size_t(k) * n + p] = c * vkp - s * vkq;
          v[std::size_t(k) * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return at(i, i) < at(j, j); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(std::size_t(n) * n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = at(order[j], order[j]);
    for (int k = 0; k < n; ++k) out.vectors[std::size_t(k) * n + j] = v[std::size_t(k) * n + order[j]];
  }
  return out;
}

bool solve_tridiagonal(std::span<const double> diag, std::span<const double> off, std::span<double> rhs) {
  const std::size_t n = diag.size();
  if (n == 0) return true;
  std::vector<double> c(n, 0.0);
  double denom = diag[0];
  if (denom == 0.0) return false;
  if (n > 1) c[0] = off[0] / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - off[i - 1] * c[i - 1];
    if (denom == 0.0) return false;
    if (i + 1 < n) c[i] = off[i] / denom;
    rhs[i] = (rhs[i] - off[i - 1] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return true;
}

}  // namespace pamlab::numerics
