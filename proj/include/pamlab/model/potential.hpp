#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "pamlab/core/types.hpp"
#include "pamlab/model/displacement.hpp"
#include "pamlab/model/params.hpp"
#include "pamlab/spectral/domain.hpp"

namespace pamlab::model {

struct PotentialValue {
  double value = 0.0;
  /// Bound on the omitted sum over sites with |q - x| > trunc_radius.  Valid
  /// when every omitted centre satisfies |x - q - xi_q| >= |q - x| / 2.
  double tail_bound = 0.0;
  /// False when some omitted site present in the configuration violates the
  /// halving condition, or the caller did not assert it for absent sites.
  bool certified = false;
};

/// sum over |q - x| <= trunc_radius of u(x - q - xi_q).  Throws CoverageError
/// when a site of that ball is absent from the configuration.
PotentialValue potential_value(const SingleSitePotential& u, const DisplacementConfig& config, const Point& x,
                               double trunc_radius, bool assume_halving = false);

/// r^2 * potential_value(u, config, r x, trunc_radius), the potential
/// sum_q r^2 u(r x - q - xi_q) at scaled position x.
PotentialValue scaled_potential_value(const SingleSitePotential& u, const DisplacementConfig& config, double r,
                                      const Point& x, double trunc_radius, bool assume_halving = false);

/// |C0| 2^alpha S_d 2^(d-1) (R - sqrt d)^(d - alpha) / (alpha - d); requires
/// R >= 1.5 sqrt d.
double potential_tail_bound(const SingleSitePotential& u, double trunc_radius);

/// Smallest R (to 1e-3) with potential_tail_bound(u, R) <= rel_tol |C0| and
/// R >= 2 r0.
double default_trunc_radius(const SingleSitePotential& u, double rel_tol = 1e-6);

struct HaloTail {
  double sup = 0.0;    // max over probes of the outside-halo sum
  double bound = 0.0;  // C0 2^alpha sum_q dist(q, P)^-alpha over outside sites
  double c1 = 0.0;     // bound * (r l)^(alpha - d)
  bool event_holds = true;
  std::size_t outside_sites = 0;
  std::size_t probes = 0;
};

/// Tail of the potential from sites outside the halo r[domain : l] seen on
/// probes of [r domain : k].  Distances to the probe set P use the continuous
/// neighbourhood, so `bound` dominates `sup` whenever event_holds.
HaloTail halo_tail_sup(const SingleSitePotential& u, const DisplacementConfig& config,
                       const spectral::GridDomain& domain, double r, double l, double k,
                       double probe_spacing = 0.5);

/// A real field V on R^d.
class PotentialField {
 public:
  virtual ~PotentialField() = default;
  virtual int dim() const = 0;
  virtual double operator()(const Point& x) const = 0;
  /// False where operator() would throw CoverageError.
  virtual bool covers(const Point& x) const = 0;
};

class ConstantPotential final : public PotentialField {
 public:
  ConstantPotential(int dim, double c) : dim_(dim), c_(c) {}
  int dim() const override { return dim_; }
  double operator()(const Point&) const override { return c_; }
  bool covers(const Point&) const override { return true; }

 private:
  int dim_;
  double c_;
};

/// V_xi(x) = sum_q u(x - q - xi_q) truncated at trunc_radius, optionally in
/// scaled form r^2 V_xi(r x).  Covered points are those whose truncation ball
/// lies inside the configuration box.
class LatticePotential final : public PotentialField {
 public:
  LatticePotential(const SingleSitePotential& u, DisplacementConfig config, double trunc_radius, double scale = 1.0);
  int dim() const override { return u_.dim(); }
  double operator()(const Point& x) const override;
  bool covers(const Point& x) const override;
  const DisplacementConfig& config() const { return config_; }
  double trunc_radius() const { return trunc_; }

 private:
  SingleSitePotential u_;
  DisplacementConfig config_;
  double trunc_;
  double scale_;
};

/// sum over a finite set of centres c of s^2 u(s x - c), restricted to
/// |s x - c| <= trunc_radius (infinite radius: no truncation).  Centres are
/// bucketed so evaluation costs O(centres within the radius).
class PointCloudPotential final : public PotentialField {
 public:
  PointCloudPotential(const SingleSitePotential& u, std::vector<Point> centres, double scale = 1.0,
                      double trunc_radius = HUGE_VAL);
  /// Centres q + xi_q of every present site.
  static std::vector<Point> centres_of(const DisplacementConfig& config);

  int dim() const override { return u_.dim(); }
  double operator()(const Point& x) const override;
  bool covers(const Point&) const override { return true; }
  const std::vector<Point>& centres() const { return centres_; }

 private:
  SingleSitePotential u_;
  std::vector<Point> centres_;
  double scale_;
  double trunc_;
  double bucket_ = 0.0;
  std::unordered_map<Site, std::vector<std::uint32_t>, SiteHash> buckets_;
};

/// Multilinear interpolation of a field tabulated on the regular grid
/// lo + spacing * j, j in [0, n_i], covering [lo, hi].
class TabulatedPotential final : public PotentialField {
 public:
  TabulatedPotential(const PotentialField& field, const Point& lo, const Point& hi, double spacing);
  int dim() const override { return dim_; }
  double operator()(const Point& x) const override;
  bool covers(const Point& x) const override;
  double spacing() const { return spacing_; }
  std::size_t size() const { return values_.size(); }

 private:
  int dim_;
  Point lo_;
  Point hi_;
  double spacing_;
  std::array<std::size_t, kMaxDim> n_{1, 1, 1};
  std::vector<double> values_;
};

}  // namespace pamlab::model
