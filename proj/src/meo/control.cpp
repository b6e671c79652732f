#include <cmath>
#include <numbers>

#include "pamlab/core/error.hpp"
#include "pamlab/meo/meo.hpp"
#include "pamlab/model/potential.hpp"
#include "pamlab/spectral/eigen.hpp"

namespace pamlab::meo {

ControlGap spectral_control_gap(const model::SingleSitePotential& u, const model::DisplacementConfig& config, double r,
                                double t, const MeoParams& meo, int nodes_per_cell) {
  const int d = config.dim();
  ControlGap out;
  out.cap = meo.cap_M > 0.0 ? meo.cap_M : 10.0 * d * std::numbers::pi * std::numbers::pi / 2.0;
  const auto rep = classify_box(config, r, t, meo, nodes_per_cell);
  const model::PointCloudPotential field(u, model::PointCloudPotential::centres_of(config), r,
                                         model::default_trunc_radius(u));

  const auto box_op = spectral::assemble_operator(rep.lambda, field);
  const auto box = spectral::principal_eigenpair(box_op);
  if (!box.converged) throw NonConvergence("spectral_control_gap: eigensolve on Lambda_{t/r} did not converge");
  out.lambda_box = box.lambda;
  out.rarefied_cells = rep.rarefied.cells.size();
  if (rep.rarefied.cells.empty()) {
    out.rarefied_empty = true;
    out.gap = HUGE_VAL;
    return out;
  }
  const auto rare_op = spectral::assemble_operator(rep.rarefied, field);
  const auto rare = spectral::principal_eigenpair(rare_op);
  if (!rare.converged) throw NonConvergence("spectral_control_gap: eigensolve on R_r did not converge");
  out.lambda_rarefied = rare.lambda;
  out.gap = std::min(rare.lambda, out.cap) - std::min(box.lambda, out.cap);
  return out;
}

}  // namespace pamlab::meo
