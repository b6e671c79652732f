#include "pamlab/model/params.hpp"

#include <cmath>

#include "pamlab/core/error.hpp"

namespace pamlab::model {

void ModelParams::validate() const {
  require(dim >= 1 && dim <= kMaxDim, "dimension must be 1, 2 or 3");
  require(std::isfinite(alpha) && alpha > double(dim), "alpha must exceed the dimension");
  require(std::isfinite(theta) && theta > 0.0, "theta must be positive");
  require(std::isfinite(c0) && c0 != 0.0, "c0 must be nonzero");
  require(std::isfinite(core_radius) && core_radius > 0.0, "core_radius must be positive");
}

SingleSitePotential::SingleSitePotential(const ModelParams& params)
    : dim_(params.dim), c0_(params.c0), alpha_(params.alpha), core_(params.core_radius) {
  params.validate();
  const double rounded = std::round(alpha_);
  if (rounded == alpha_ && rounded >= 1.0 && rounded <= 16.0) int_alpha_ = int(rounded);
}

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a) + std::abs(b)); }

Regime classify_regime(const ModelParams& p) {
  p.validate();
  if (p.c0 < 0.0) return Regime::NegativeU;
  const double d = p.dim;
  if (p.alpha < d + 2.0 && !nearly_equal(p.alpha, d + 2.0)) return Regime::HeavyTail;
  if (p.dim == 1) return nearly_equal(p.alpha, 3.0) ? Regime::OneDimCritical : Regime::OneDimLight;
  if (p.dim == 2 && !nearly_equal(p.alpha, 4.0)) return Regime::TwoDimLog;
  return Regime::Critical;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::HeavyTail: return "heavy_tail";
    case Regime::OneDimCritical: return "d1_alpha3";
    case Regime::OneDimLight: return "d1_alpha_gt3";
    case Regime::TwoDimLog: return "d2_alpha_gt4";
    case Regime::Critical: return "critical";
    case Regime::NegativeU: return "negative_u";
  }
  return "unknown";
}

}  // namespace pamlab::model
