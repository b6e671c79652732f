#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pamlab/spectral/eigen.hpp"

namespace pamlab::spectral {

struct MassCell {
  Site cell{0, 0, 0};        // p: the cube (p + [0,1]^d) / r
  double mass = 0.0;         // integral of phi over that cube
  double lower_bound = 0.0;  // r^(-d-chi) / (2 ||phi||_inf)
  bool inequality_holds = false;
  bool size_condition = false;  // |domain| < r^chi
};

/// Cube of side 1/r (domain units) carrying the largest integral of phi.
/// Nodes on shared faces are split evenly between the cubes containing them.
/// Requires the mesh to resolve the 1/r cubes.
MassCell eigenfunction_mass_cell(const SpectralResult& result, const Mesh& mesh, double r, double chi);

/// Node coordinates and phi, preceded by a schema comment.
void write_eigen_csv(std::ostream& os, const Mesh& mesh, const SpectralResult& result);
/// JSON header: lambda, residual, h, iterations, converged, nodes.
std::string eigen_json_header(const SpectralResult& result, std::size_t nodes);

/// One integer tuple per line; '#' starts a comment.
void write_cells(std::ostream& os, const GridDomain& domain);
GridDomain read_cells(std::istream& is, int dim, int nodes_per_cell, double cell_size = 1.0);

}  // namespace pamlab::spectral
