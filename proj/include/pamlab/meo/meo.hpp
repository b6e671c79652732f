#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pamlab/core/rng.hpp"
#include "pamlab/model/displacement.hpp"
#include "pamlab/model/params.hpp"
#include "pamlab/numerics/stats.hpp"
#include "pamlab/spectral/domain.hpp"

namespace pamlab::meo {

/// n with 2^(-n-1) < r^(-beta) <= 2^(-n).
int n_beta(double beta, double r);

struct MeoParams {
  double chi = 0.0;
  double eta = 0.0;
  double gamma_meo = 1.0;
  double halo_width = 4.0;
  double cap_M = 0.0;
};

/// chi at the midpoint of ((mu - 2/d) theta, mu theta); eta the largest 2^-k
/// with 2 eta^2 + (d - 2 + 2 theta/d) eta < theta/d; gamma = (d - 2 + 2 eta)/d.
/// Requires d >= 2 and alpha >= d + 2 or (d, alpha) = (2, 4).
MeoParams choose_meo_params(const model::ModelParams& params);

/// True when p satisfies both defining inequalities for (d, theta, mu).
bool meo_params_feasible(const MeoParams& p, int dim, double theta, double mu);

struct DensityVerdict {
  bool density = false;
  int coarse_level = 0;  // n_{eta gamma}; 0 means the cube itself
  int fine_level = 0;    // n_gamma (n_1 when d = 1)
  std::size_t failing_coarse_boxes = 0;
};

/// Density test for the unit cube C_q.  For d >= 2, every level-n_{eta gamma}
/// box inside C_q must have at least ceil(half) of its level-n_gamma sub-boxes
/// i' whose closed shrunk box q_i' + 2^(-n_gamma-1)[0,1]^d holds a scaled point
/// (q' + xi_q')/r.  For d = 1, every level-n_1 sub-box of C_q must hold a
/// scaled point.  Requires the configuration to cover r (q + [-1, 2]^d).
DensityVerdict classify_density_detail(const model::DisplacementConfig& config, double r, const Site& q,
                                       const MeoParams& meo);
inline bool classify_density(const model::DisplacementConfig& config, double r, const Site& q, const MeoParams& meo) {
  return classify_density_detail(config, r, q, meo).density;
}

/// Lattice box of sites that must be present to classify every cube of `cells`.
LatticeBox classification_sites(int dim, const LatticeBox& cells, double r);

struct DensityReport {
  spectral::GridDomain lambda;    // Lambda_{t/r}
  spectral::GridDomain rarefied;  // non-density cubes of lambda (cells may be empty)
  std::vector<std::pair<Site, bool>> verdicts;
  bool levels_collapsed = false;  // n_{eta gamma} == 0
};

/// Classifies every unit cube of Lambda_{t/r}; the rarefied domain uses
/// `nodes_per_cell` for later spectral work.
DensityReport classify_box(const model::DisplacementConfig& config, double r, double t, const MeoParams& meo,
                           int nodes_per_cell = 8);

inline spectral::GridDomain rarefied_set(const model::DisplacementConfig& config, double r, double t,
                                         const MeoParams& meo, int nodes_per_cell = 8) {
  return classify_box(config, r, t, meo, nodes_per_cell).rarefied;
}

/// Face-connected components of a cell set.
std::vector<spectral::GridDomain> lattice_animals(const spectral::GridDomain& cells);

/// Every lattice animal with at most `max_cells` cells inside `region`,
/// in canonical (sorted cell list) order.
std::vector<std::vector<Site>> enumerate_animals(const spectral::GridDomain& region, int max_cells);

struct RelevantCaps {
  int dim = 1;
  int max_cells = 2;
  int displacement_cap = 1;  // |zeta_q| <= cap, Euclidean
  double halo = 1.0;         // l
  std::uint64_t work_bound = 10'000'000;
};

struct RelevantPair {
  std::vector<Site> animal;
  std::vector<Site> halo_sites;  // (r [animal : l]) intersected with Lambda_t
  std::vector<Site> zeta;        // aligned with halo_sites
};

/// Streams the pairs (R, zeta) of the relevant-configuration set at toy
/// scale.  The constructor computes the exact count and throws
/// WorkBoundExceeded when it exceeds the caps' work bound.
class RelevantEnumerator {
 public:
  RelevantEnumerator(double r, double t, const RelevantCaps& caps);

  std::uint64_t count() const { return count_; }
  const std::vector<Site>& displacement_set() const { return moves_; }
  std::size_t animals() const { return animals_.size(); }

  /// Fills `out` with the next pair; false when exhausted.
  bool next(RelevantPair& out);
  void reset();

 private:
  std::vector<std::vector<Site>> animals_;
  std::vector<std::vector<Site>> halos_;
  std::vector<Site> moves_;
  std::uint64_t count_ = 0;
  std::size_t animal_ = 0;
  std::vector<std::size_t> odometer_;
  bool started_ = false;
};

/// Sites q in Z^d with dist(q, r * animal) < r l and q in Lambda_t.
std::vector<Site> halo_sites(int dim, const std::vector<Site>& animal, double r, double t, double l);

/// Lattice vectors p with |p| <= cap, sorted by (|p|, lexicographic).
std::vector<Site> capped_displacements(int dim, int cap);

struct VolumeTrial {
  std::size_t samples = 0;
  std::size_t hits = 0;  // samples with |R_r| >= r^chi
  double probability = 0.0;
  numerics::Interval wilson;
  double bound_exponent = 0.0;  // d (1 - eta gamma) + (1 - gamma) theta + chi
  double rate = 0.0;            // r^bound_exponent
  /// min over hits of sum_{Lambda_t} |xi|^theta / rate (+inf without hits).
  double min_cost_ratio = HUGE_VAL;
};

/// Monte Carlo estimate of P(|R_r| >= r^chi).  Sample s uses the stream
/// derive_stream(seed, s).
VolumeTrial volume_bound_trial(const model::ModelParams& params, double r, double t, const MeoParams& meo,
                               std::size_t n_samples, std::uint64_t seed);

struct ControlGap {
  double gap = 0.0;  // (lambda(R_r) ^ M) - (lambda(Lambda_{t/r}) ^ M); +inf when R_r is empty
  double lambda_rarefied = HUGE_VAL;
  double lambda_box = 0.0;
  double cap = 0.0;
  bool rarefied_empty = false;
  std::size_t rarefied_cells = 0;
};

/// Diagnostic of the spectral control statement with the scaled potential
/// sum_q r^2 u(r x - q - xi_q) over every site of the configuration.
/// cap = meo.cap_M, or 10 d pi^2 / 2 when meo.cap_M is 0.
ControlGap spectral_control_gap(const model::SingleSitePotential& u, const model::DisplacementConfig& config, double r,
                                double t, const MeoParams& meo, int nodes_per_cell = 8);

void write_density_csv(std::ostream& os, double r, double t, const MeoParams& meo, const DensityReport& report);
void write_volume_csv(std::ostream& os, double r, double t, const MeoParams& meo, const VolumeTrial& trial);

}  // namespace pamlab::meo
