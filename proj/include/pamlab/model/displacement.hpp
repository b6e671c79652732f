#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "pamlab/core/rng.hpp"
#include "pamlab/core/types.hpp"
#include "pamlab/model/params.hpp"

namespace pamlab::model {

struct NormalizingConstant {
  double value = 0.0;
  double tail_bound = 0.0;  // certified bound on the omitted mass
  int radius = 0;           // enumeration radius, |p| <= radius summed exactly
};

/// Z(d, theta) = sum over p in Z^d of exp(-|p|^theta), with a certified tail
/// bound <= tol.  Throws WorkBoundExceeded when the enumeration radius would
/// exceed the lattice-point budget.
NormalizingConstant normalizing_constant_detail(int dim, double theta, double tol = 1e-12);

inline double normalizing_constant(int dim, double theta, double tol = 1e-12) {
  return normalizing_constant_detail(dim, theta, tol).value;
}

/// Upper bound on sum_{|p| > radius} exp(-|p|^theta), valid for radius >= 1.5 sqrt(d).
double normalizing_tail_bound(int dim, double theta, double radius);

/// The single-site displacement law P(xi = p) = exp(-|p|^theta) / Z, sampled
/// by inverse CDF over atoms in increasing |p|.  Atoms are enumerated shell by
/// shell until the cumulative mass reaches 1 - mass_tol; the residual mass is
/// spread over the last shell.
class DisplacementLaw {
 public:
  DisplacementLaw(int dim, double theta, double mass_tol = 1e-12);

  Site sample(Rng& rng) const;

  int dim() const { return dim_; }
  double theta() const { return theta_; }
  double z() const { return z_; }
  double log_z() const { return log_z_; }

  /// Exact mass exp(-|p|^theta) / Z of the untruncated law.
  double mass(const Site& p) const;

  const std::vector<Site>& atoms() const { return atoms_; }

 private:
  int dim_;
  double theta_;
  double z_;
  double log_z_;
  std::vector<Site> atoms_;
  std::vector<double> cumulative_;
};

/// Finite map q -> xi_q over sites of a bounding box.  Sites may be absent;
/// absent sites carry no potential centre.
class DisplacementConfig {
 public:
  DisplacementConfig() = default;

  /// Every site of `box` present with xi = 0.
  static DisplacementConfig zeros(const LatticeBox& box);
  /// Bounding box with no site present.
  static DisplacementConfig empty(const LatticeBox& box);

  int dim() const { return box_.dim; }
  const LatticeBox& box() const { return box_; }
  std::size_t size() const { return count_; }

  bool contains(const Site& q) const { return box_.contains(q) && present_[box_.index(q)]; }
  const Site& xi(const Site& q) const;
  void set(const Site& q, const Site& xi);
  void erase(const Site& q);

  /// True when every site of `region` is present.
  bool covers(const LatticeBox& region) const;

  template <class F>
  void for_each(F&& f) const {
    const std::size_t n = present_.size();
    for (std::size_t i = 0; i < n; ++i)
      if (present_[i]) f(box_.site(i), xi_[i]);
  }

  bool operator==(const DisplacementConfig& other) const;

 private:
  LatticeBox box_;
  std::vector<Site> xi_;
  std::vector<unsigned char> present_;
  std::size_t count_ = 0;
};

/// log P(xi = config) = -sum |xi_q|^theta - N log Z.
double displacement_log_weight(const DisplacementConfig& config, double theta, double log_z);

/// sum |xi_q|^theta over present sites.
double displacement_cost(const DisplacementConfig& config, double theta);

/// Independent draws at every site of `sites`.
DisplacementConfig sample_config(const DisplacementLaw& law, const LatticeBox& sites, Rng& rng);

/// Line format: "q_1 ... q_d : xi_1 ... xi_d", one site per line.  Lines
/// starting with '#' are comments.
void write_config(std::ostream& os, const DisplacementConfig& config);
DisplacementConfig read_config(std::istream& is, int dim);

}  // namespace pamlab::model
