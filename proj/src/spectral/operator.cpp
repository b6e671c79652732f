#include "pamlab/spectral/operator.hpp"

#include <algorithm>
#include <cmath>

#include "pamlab/core/error.hpp"
#include "pamlab/numerics/dense.hpp"

namespace pamlab::spectral {
namespace {

constexpr std::size_t kParallelThreshold = 4096;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

SchrodingerOperator::SchrodingerOperator(std::shared_ptr<const Mesh> mesh, std::vector<double> potential)
    : mesh_(std::move(mesh)) {
  require(mesh_ != nullptr, "SchrodingerOperator: null mesh");
  const double h = mesh_->h();
  diag0_ = double(mesh_->dim()) / (h * h);
  off_ = -0.5 / (h * h);
  if (mesh_->dim() == 1 && mesh_->size() > 1) {
    chain_.assign(mesh_->size() - 1, 0.0);
    for (std::size_t i = 0; i + 1 < mesh_->size(); ++i)
      if (mesh_->linked_to_next(i)) chain_[i] = off_;
  }
  set_potential(std::move(potential));
}

void SchrodingerOperator::set_potential(std::vector<double> potential) {
  require(potential.size() == mesh_->size(), "SchrodingerOperator: potential size does not match the mesh");
  for (double v : potential) require(std::isfinite(v), "SchrodingerOperator: potential must be finite");
  v_ = std::move(potential);
}

double SchrodingerOperator::min_potential() const { return *std::min_element(v_.begin(), v_.end()); }

void SchrodingerOperator::apply_serial(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (auto j : mesh_->neighbors(i))
      if (j >= 0) s += x[std::size_t(j)];
    y[i] = (diag0_ + v_[i]) * x[i] + off_ * s;
  }
}

void SchrodingerOperator::apply(std::span<const double> x, std::span<double> y) const {
  const std::ptrdiff_t n = std::ptrdiff_t(size());
  if (std::size_t(n) < kParallelThreshold) return apply_serial(x, y);
  const Mesh& mesh = *mesh_;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (auto j : mesh.neighbors(std::size_t(i)))
      if (j >= 0) s += x[std::size_t(j)];
    y[std::size_t(i)] = (diag0_ + v_[std::size_t(i)]) * x[std::size_t(i)] + off_ * s;
  }
}

std::vector<double> sample_potential(const Mesh& mesh, const model::PotentialField& field) {
  require(field.dim() == mesh.dim(), "sample_potential: dimension mismatch");
  std::vector<double> v(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) v[i] = field(mesh.position(i));
  return v;
}

SchrodingerOperator assemble_operator(const GridDomain& domain, std::vector<double> potential) {
  return SchrodingerOperator(std::make_shared<const Mesh>(domain), std::move(potential));
}

SchrodingerOperator assemble_operator(const GridDomain& domain, const model::PotentialField& field) {
  auto mesh = std::make_shared<const Mesh>(domain);
  auto v = sample_potential(*mesh, field);
  return SchrodingerOperator(std::move(mesh), std::move(v));
}

SchrodingerOperator assemble_operator(const GridDomain& domain) {
  auto mesh = std::make_shared<const Mesh>(domain);
  std::vector<double> v(mesh->size(), 0.0);
  return SchrodingerOperator(std::move(mesh), std::move(v));
}

double weighted_dot(const Mesh& mesh, std::span<const double> x, std::span<const double> y) {
  return mesh.cell_volume() * dot(x, y);
}

double weighted_norm(const Mesh& mesh, std::span<const double> x) { return std::sqrt(weighted_dot(mesh, x, x)); }

SolveStats solve_shifted(const SchrodingerOperator& op, double shift, std::span<const double> b, std::span<double> x,
                         double rel_tol, int max_iter) {
  const std::size_t n = op.size();
  require(b.size() == n && x.size() == n, "solve_shifted: size mismatch");
  SolveStats st;
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    st.converged = true;
    return st;
  }
  std::vector<double> r(n), z(n), p(n), q(n);

  if (op.mesh().dim() == 1) {
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = op.diagonal(i) + shift;
    std::copy(b.begin(), b.end(), x.begin());
    if (!numerics::solve_tridiagonal(diag, op.chain_coupling(), x))
      throw NonConvergence("solve_shifted: singular tridiagonal system");
    op.apply(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i] - shift * x[i];
    st.iterations = 1;
    st.residual = std::sqrt(dot(r, r)) / bnorm;
    st.converged = true;
    return st;
  }

  if (max_iter <= 0) max_iter = int(std::min<std::size_t>(20 * n + 100, 1000000));
  std::vector<double> inv_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dgi = op.diagonal(i) + shift;
    require(dgi > 0.0, "solve_shifted: shifted operator is not positive definite");
    inv_diag[i] = 1.0 / dgi;
  }
  op.apply(std::span<const double>(x.data(), n), q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i] - shift * x[i];
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  double rnorm = std::sqrt(dot(r, r));
  int it = 0;
  while (rnorm > rel_tol * bnorm && it < max_iter) {
    op.apply(p, q);
    for (std::size_t i = 0; i < n; ++i) q[i] += shift * p[i];
    const double pq = dot(p, q);
    if (!(pq > 0.0)) throw NonConvergence("solve_shifted: operator is not positive definite");
    const double a = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += a * p[i];
      r[i] -= a * q[i];
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = std::sqrt(dot(r, r));
    ++it;
  }
  st.iterations = it;
  st.residual = rnorm / bnorm;
  st.converged = rnorm <= rel_tol * bnorm;
  return st;
}

}  // namespace pamlab::spectral
