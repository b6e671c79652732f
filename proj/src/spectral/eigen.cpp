#include "pamlab/spectral/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pamlab/core/error.hpp"
#include "pamlab/numerics/dense.hpp"

namespace pamlab::spectral {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void scale(std::vector<double>& a, double s) {
  for (double& v : a) v *= s;
}

struct ComponentResult {
  double lambda;
  std::vector<double> phi;  // unit 2-norm
  double residual;          // 2-norm, relative to the unit vector
  int iterations;
  bool converged;
};

ComponentResult solve_component(const SchrodingerOperator& op, std::vector<double> v, const EigenOptions& opt) {
  const std::size_t n = op.size();
  const double sigma = std::min(0.0, op.min_potential());
  // H - sigma is positive definite: the Dirichlet Laplacian part is.
  const double shift = -sigma;
  const int k = std::max(2, opt.krylov_dim);

  scale(v, 1.0 / std::sqrt(dot(v, v)));
  std::vector<std::vector<double>> Q, HQ;
  std::vector<double> w(n), hw(n), phi(n), hphi(n);
  ComponentResult best{std::numeric_limits<double>::infinity(), v, std::numeric_limits<double>::infinity(), 0, false};

  for (int it = 1; it <= opt.max_iter; ++it) {
    Q.assign(1, v);
    for (int j = 1; j < k; ++j) {
      std::fill(w.begin(), w.end(), 0.0);
      solve_shifted(op, shift, Q.back(), w, opt.inner_tol);
      const double wn0 = std::sqrt(dot(w, w));
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : Q) {
          const double c = dot(q, w);
          for (std::size_t i = 0; i < n; ++i) w[i] -= c * q[i];
        }
      const double wn = std::sqrt(dot(w, w));
      if (!(wn > 1e-12 * wn0)) break;
      scale(w, 1.0 / wn);
      Q.push_back(w);
    }
    const int m = int(Q.size());
    HQ.resize(std::size_t(m));
    for (int j = 0; j < m; ++j) {
      HQ[std::size_t(j)].resize(n);
      op.apply(Q[std::size_t(j)], HQ[std::size_t(j)]);
    }
    std::vector<double> T(std::size_t(m * m));
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) {
        const double t = 0.5 * (dot(Q[std::size_t(a)], HQ[std::size_t(b)]) + dot(Q[std::size_t(b)], HQ[std::size_t(a)]));
        T[std::size_t(a * m + b)] = T[std::size_t(b * m + a)] = t;
      }
    const auto eig = numerics::jacobi_eigen(std::move(T), m);
    std::fill(phi.begin(), phi.end(), 0.0);
    std::fill(hphi.begin(), hphi.end(), 0.0);
    for (int j = 0; j < m; ++j) {
      const double y = eig.vectors[std::size_t(j * m)];
      for (std::size_t i = 0; i < n; ++i) {
        phi[i] += y * Q[std::size_t(j)][i];
        hphi[i] += y * HQ[std::size_t(j)][i];
      }
    }
    const double pn = std::sqrt(dot(phi, phi));
    scale(phi, 1.0 / pn);
    scale(hphi, 1.0 / pn);
    const double lam = dot(phi, hphi);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += (hphi[i] - lam * phi[i]) * (hphi[i] - lam * phi[i]);
    res = std::sqrt(res);
    if (res < best.residual || lam < best.lambda - 1e-14 * std::abs(lam)) best = {lam, phi, res, it, false};
    best.iterations = it;
    // Margin for the clamp and reweighting applied afterwards.
    if (res <= 0.25 * opt.tol * std::max(1.0, std::abs(lam))) {
      best = {lam, phi, res, it, true};
      return best;
    }
    if (m == 1) break;  // invariant subspace to working precision; no further progress
    v = phi;
  }
  return best;
}

}  // namespace

double rayleigh_quotient(const SchrodingerOperator& op, std::span<const double> x) {
  std::vector<double> y(op.size());
  op.apply(x, y);
  return dot(x, y) / dot(x, x);
}

SpectralResult principal_eigenpair(const SchrodingerOperator& op, const EigenOptions& opt) {
  require(opt.tol > 0.0, "principal_eigenpair: tol must be positive");
  require(opt.max_iter >= 1, "principal_eigenpair: max_iter must be >= 1");
  const Mesh& mesh = op.mesh();
  const std::size_t n = op.size();
  require(opt.initial.empty() || opt.initial.size() == n, "principal_eigenpair: warm start has the wrong size");

  SpectralResult out;
  out.h = mesh.h();
  out.dim = mesh.dim();
  out.lambda = std::numeric_limits<double>::infinity();
  const auto comps = mesh.components();
  bool any = false;
  for (const auto& comp : comps) {
    std::vector<double> start(n, 0.0);
    bool warm = false;
    if (!opt.initial.empty()) {
      for (auto i : comp) start[i] = std::abs(opt.initial[i]);
      warm = dot(start, start) > 0.0;
    }
    if (!warm)
      for (auto i : comp) start[i] = 1.0;
    ComponentResult c = solve_component(op, std::move(start), opt);
    out.iterations += c.iterations;
    if (!any || c.lambda < out.lambda) {
      any = true;
      out.lambda = c.lambda;
      out.phi = std::move(c.phi);
      out.converged = c.converged;
      out.residual = c.residual;
    }
  }

  // Sign, clamp tiny negative round-off, weighted normalization.
  double s = 0.0;
  for (double v : out.phi) s += v;
  if (s < 0.0) scale(out.phi, -1.0);
  for (double& v : out.phi) v = std::max(v, 0.0);
  const double nrm = weighted_norm(mesh, out.phi);
  scale(out.phi, 1.0 / nrm);
  std::vector<double> hphi(n);
  op.apply(out.phi, hphi);
  out.lambda = weighted_dot(mesh, out.phi, hphi);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) res += (hphi[i] - out.lambda * out.phi[i]) * (hphi[i] - out.lambda * out.phi[i]);
  out.residual = std::sqrt(mesh.cell_volume() * res);
  out.converged = out.converged && out.residual <= opt.tol * std::max(1.0, std::abs(out.lambda));
  return out;
}

}  // namespace pamlab::spectral
