#include "pamlab/model/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pamlab/core/error.hpp"

namespace pamlab::model {
namespace {

double sphere_area(int d) {
  // Surface of the unit sphere in R^d: 2, 2 pi, 4 pi.
  return d == 1 ? 2.0 : (d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi);
}

// Lattice box of sites q with |q - x| <= R.
LatticeBox ball_box(int dim, const Point& x, double R) {
  Site lo{0, 0, 0}, hi{0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    lo[i] = int(std::ceil(x[i] - R));
    hi[i] = int(std::floor(x[i] + R));
  }
  return LatticeBox::from_bounds(dim, lo, hi);
}

double dist2(const Point& a, const Site& q, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double e = a[i] - q[i];
    s += e * e;
  }
  return s;
}

}  // namespace

double potential_tail_bound(const SingleSitePotential& u, double R) {
  const int d = u.dim();
  require(R >= 1.5 * std::sqrt(double(d)), "tail bound needs trunc_radius >= 1.5 sqrt(d)");
  const double a = u.alpha();
  return std::abs(u.c0()) * std::pow(2.0, a) * sphere_area(d) * std::pow(2.0, d - 1) *
         std::pow(R - std::sqrt(double(d)), d - a) / (a - d);
}

double default_trunc_radius(const SingleSitePotential& u, double rel_tol) {
  require(rel_tol > 0.0, "rel_tol must be positive");
  const double target = rel_tol * std::abs(u.c0());
  double lo = std::max(2.0 * u.core_radius(), 1.5 * std::sqrt(double(u.dim())));
  if (potential_tail_bound(u, lo) <= target) return lo;
  double hi = 2.0 * lo;
  while (potential_tail_bound(u, hi) > target) hi *= 2.0;
  while (hi - lo > 1e-3 && hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (potential_tail_bound(u, mid) > target ? lo : hi) = mid;
  }
  return hi;
}

PotentialValue potential_value(const SingleSitePotential& u, const DisplacementConfig& config, const Point& x,
                               double R, bool assume_halving) {
  const int d = u.dim();
  require(config.dim() == d, "potential_value: dimension mismatch");
  require(R >= 2.0 * u.core_radius(), "potential_value: trunc_radius must be >= 2 r0");
  const LatticeBox ball = ball_box(d, x, R);
  const double R2 = R * R;
  PotentialValue out;
  double sum = 0.0;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const Site q = ball.site(i);
    if (dist2(x, q, d) > R2) continue;
    if (!config.contains(q)) throw CoverageError("potential_value: configuration does not cover the truncation ball");
    const Site& xi = config.xi(q);
    Point z{};
    for (int a = 0; a < d; ++a) z[a] = x[a] - q[a] - xi[a];
    sum += u(z);
  }
  out.value = sum;
  out.tail_bound = R >= 1.5 * std::sqrt(double(d)) ? potential_tail_bound(u, R) : HUGE_VAL;
  bool ok = assume_halving;
  if (ok) {
    config.for_each([&](const Site& q, const Site& xi) {
      const double dq2 = dist2(x, q, d);
      if (dq2 <= R2) return;
      Point z{};
      for (int a = 0; a < d; ++a) z[a] = x[a] - q[a] - xi[a];
      if (4.0 * (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]) < dq2) ok = false;
    });
  }
  out.certified = ok;
  return out;
}

PotentialValue scaled_potential_value(const SingleSitePotential& u, const DisplacementConfig& config, double r,
                                      const Point& x, double R, bool assume_halving) {
  require(r >= 1.0, "scaled_potential_value: r must be >= 1");
  PotentialValue v = potential_value(u, config, r * x, R, assume_halving);
  v.value *= r * r;
  v.tail_bound *= r * r;
  return v;
}

HaloTail halo_tail_sup(const SingleSitePotential& u, const DisplacementConfig& config,
                       const spectral::GridDomain& domain, double r, double l, double k, double spacing) {
  require(!domain.cells.empty(), "halo_tail_sup: empty domain");
  require(r > 0.0 && l > 0.0 && k >= 0.0 && spacing > 0.0, "halo_tail_sup: bad scale parameters");
  require(u.c0() > 0.0, "halo_tail_sup: requires C0 > 0");
  const int d = u.dim();
  const double scale = r * domain.cell_size;

  // Probe grid on the k-neighbourhood of r * domain.
  const LatticeBox cb = domain.cell_bounds();
  std::vector<Point> probes;
  {
    std::array<long, kMaxDim> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      lo[a] = long(std::floor((scale * cb.lo[a] - k) / spacing));
      hi[a] = long(std::ceil((scale * (cb.hi[a] + 1) + k) / spacing));
    }
    for (long i = lo[0]; i <= hi[0]; ++i)
      for (long j = lo[1]; j <= hi[1]; ++j)
        for (long m = lo[2]; m <= hi[2]; ++m) {
          const Point p{i * spacing, d > 1 ? j * spacing : 0.0, d > 2 ? m * spacing : 0.0};
          if (domain.distance_to(p, r) <= k + 1e-12) probes.push_back(p);
        }
  }

  HaloTail out;
  out.probes = probes.size();
  std::vector<Point> centres;
  double bound_sum = 0.0;
  const double halo = r * l;
  config.for_each([&](const Site& q, const Site& xi) {
    const Point pq = to_point(q);
    const double dq = domain.distance_to(pq, r);
    if (dq < halo) return;
    ++out.outside_sites;
    const Point c = pq + to_point(xi);
    const double dp = std::max(0.0, dq - k);
    const double dc = std::max(0.0, domain.distance_to(c, r) - k);
    if (dc < 0.5 * dp) out.event_holds = false;
    bound_sum += std::pow(dp, -u.alpha());
    centres.push_back(c);
  });
  for (const auto& x : probes) {
    double s = 0.0;
    for (const auto& c : centres) s += u(x - c);
    out.sup = std::max(out.sup, s);
  }
  out.bound = u.c0() * std::pow(2.0, u.alpha()) * bound_sum;
  out.c1 = out.bound * std::pow(halo, u.alpha() - d);
  return out;
}

LatticePotential::LatticePotential(const SingleSitePotential& u, DisplacementConfig config, double trunc_radius,
                                   double scale)
    : u_(u), config_(std::move(config)), trunc_(trunc_radius), scale_(scale) {
  require(config_.dim() == u.dim(), "LatticePotential: dimension mismatch");
  require(trunc_ >= 2.0 * u.core_radius(), "LatticePotential: trunc_radius must be >= 2 r0");
  require(scale_ >= 1.0, "LatticePotential: scale must be >= 1");
}

bool LatticePotential::covers(const Point& x) const {
  const int d = u_.dim();
  const LatticeBox ball = ball_box(d, scale_ * x, trunc_);
  const LatticeBox& box = config_.box();
  for (int a = 0; a < d; ++a)
    if (ball.lo[a] < box.lo[a] || ball.hi[a] > box.hi[a]) return false;
  return true;
}

double LatticePotential::operator()(const Point& x) const {
  return scale_ == 1.0 ? potential_value(u_, config_, x, trunc_).value
                       : scaled_potential_value(u_, config_, scale_, x, trunc_).value;
}

PointCloudPotential::PointCloudPotential(const SingleSitePotential& u, std::vector<Point> centres, double scale,
                                         double trunc_radius)
    : u_(u), centres_(std::move(centres)), scale_(scale), trunc_(trunc_radius) {
  require(scale_ > 0.0, "PointCloudPotential: scale must be positive");
  require(trunc_radius > 0.0, "PointCloudPotential: trunc_radius must be positive");
  if (std::isfinite(trunc_)) {
    bucket_ = trunc_;
    for (std::size_t i = 0; i < centres_.size(); ++i) {
      Site b{0, 0, 0};
      for (int a = 0; a < u_.dim(); ++a) b[a] = int(std::floor(centres_[i][a] / bucket_));
      buckets_[b].push_back(std::uint32_t(i));
    }
  }
}

std::vector<Point> PointCloudPotential::centres_of(const DisplacementConfig& config) {
  std::vector<Point> c;
  c.reserve(config.size());
  config.for_each([&](const Site& q, const Site& xi) { c.push_back(to_point(q + xi)); });
  return c;
}

double PointCloudPotential::operator()(const Point& x) const {
  const int d = u_.dim();
  const Point y = scale_ * x;
  const double s2 = scale_ * scale_;
  double sum = 0.0;
  if (!std::isfinite(trunc_)) {
    for (const auto& c : centres_) sum += u_(y - c);
    return s2 * sum;
  }
  Site b{0, 0, 0};
  for (int a = 0; a < d; ++a) b[a] = int(std::floor(y[a] / bucket_));
  const double R2 = trunc_ * trunc_;
  const int e1 = d > 1 ? 1 : 0, e2 = d > 2 ? 1 : 0;
  for (int i = -1; i <= 1; ++i)
    for (int j = -e1; j <= e1; ++j)
      for (int k = -e2; k <= e2; ++k) {
        auto it = buckets_.find(Site{b[0] + i, b[1] + j, b[2] + k});
        if (it == buckets_.end()) continue;
        for (auto idx : it->second) {
          const Point z = y - centres_[idx];
          if (z[0] * z[0] + z[1] * z[1] + z[2] * z[2] <= R2) sum += u_(z);
        }
      }
  return s2 * sum;
}

TabulatedPotential::TabulatedPotential(const PotentialField& field, const Point& lo, const Point& hi, double spacing)
    : dim_(field.dim()), lo_(lo), hi_(hi), spacing_(spacing) {
  require(spacing > 0.0, "TabulatedPotential: spacing must be positive");
  for (int a = 0; a < dim_; ++a) {
    require(hi[a] > lo[a], "TabulatedPotential: empty box");
    n_[a] = std::size_t(std::ceil((hi[a] - lo[a]) / spacing - 1e-12)) + 1;
    hi_[a] = lo[a] + double(n_[a] - 1) * spacing;
  }
  values_.resize(n_[0] * n_[1] * n_[2]);
  for (std::size_t i = 0; i < n_[0]; ++i)
    for (std::size_t j = 0; j < n_[1]; ++j)
      for (std::size_t m = 0; m < n_[2]; ++m) {
        const Point p{lo_[0] + double(i) * spacing, dim_ > 1 ? lo_[1] + double(j) * spacing : 0.0,
                      dim_ > 2 ? lo_[2] + double(m) * spacing : 0.0};
        values_[(i * n_[1] + j) * n_[2] + m] = field(p);
      }
}

bool TabulatedPotential::covers(const Point& x) const {
  for (int a = 0; a < dim_; ++a)
    if (!(x[a] >= lo_[a] && x[a] <= hi_[a])) return false;
  return true;
}

double TabulatedPotential::operator()(const Point& x) const {
  if (!covers(x)) throw CoverageError("TabulatedPotential: point outside the tabulated box");
  std::size_t base[kMaxDim] = {0, 0, 0};
  double w[kMaxDim] = {0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) {
    const double s = (x[a] - lo_[a]) / spacing_;
    std::size_t b = std::size_t(s);
    if (b + 1 >= n_[a]) b = n_[a] >= 2 ? n_[a] - 2 : 0;
    base[a] = b;
    w[a] = n_[a] >= 2 ? s - double(b) : 0.0;
  }
  double v = 0.0;
  const int corners = 1 << dim_;
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    std::size_t idx[kMaxDim] = {0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
      const int bit = (c >> a) & 1;
      weight *= bit ? w[a] : 1.0 - w[a];
      idx[a] = base[a] + std::size_t(bit);
    }
    if (weight != 0.0) v += weight * values_[(idx[0] * n_[1] + idx[1]) * n_[2] + idx[2]];
  }
  return v;
}

}  // namespace pamlab::model
