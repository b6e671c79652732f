#pragma once

#include <memory>
#include <span>
#include <vector>

#include "pamlab/model/potential.hpp"
#include "pamlab/spectral/domain.hpp"

namespace pamlab::spectral {

/// Matrix-free H = -1/2 Delta_h + V with the (2d+1)-point stencil and
/// Dirichlet exterior.  Diagonal d/h^2 + V_i, off-diagonal -1/(2h^2).
class SchrodingerOperator {
 public:
  SchrodingerOperator(std::shared_ptr<const Mesh> mesh, std::vector<double> potential);

  std::size_t size() const { return v_.size(); }
  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }

  const std::vector<double>& potential() const { return v_; }
  void set_potential(std::vector<double> potential);
  double min_potential() const;

  double diagonal(std::size_t i) const { return diag0_ + v_[i]; }
  double coupling() const { return off_; }

  /// y = H x, parallel over nodes.
  void apply(std::span<const double> x, std::span<double> y) const;
  /// Sequential reference for apply().
  void apply_serial(std::span<const double> x, std::span<double> y) const;

  /// In one dimension: coupling to the next node (0 across gaps).
  const std::vector<double>& chain_coupling() const { return chain_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<double> v_;
  double diag0_;
  double off_;
  std::vector<double> chain_;
};

std::vector<double> sample_potential(const Mesh& mesh, const model::PotentialField& field);

SchrodingerOperator assemble_operator(const GridDomain& domain, std::vector<double> potential);
SchrodingerOperator assemble_operator(const GridDomain& domain, const model::PotentialField& field);
/// V = 0.
SchrodingerOperator assemble_operator(const GridDomain& domain);

/// <x, y> with cell volume h^d.
double weighted_dot(const Mesh& mesh, std::span<const double> x, std::span<const double> y);
double weighted_norm(const Mesh& mesh, std::span<const double> x);

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  // relative 2-norm residual
  bool converged = false;
};

/// Solves (H + shift I) x = b for an SPD shifted operator.  One-dimensional
/// meshes use a direct tridiagonal solve; otherwise Jacobi-preconditioned CG
/// seeded with the incoming x.
SolveStats solve_shifted(const SchrodingerOperator& op, double shift, std::span<const double> b, std::span<double> x,
                         double rel_tol = 1e-13, int max_iter = 0);

}  // namespace pamlab::spectral
