#include "pamlab/model/displacement.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pamlab/core/error.hpp"

namespace pamlab::model {
namespace {

constexpr long long kMaxEnumeratedPoints = 200'000'000;

double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

long long ball_point_estimate(int dim, int radius) {
  const double side = 2.0 * radius + 1.0;
  return (long long)std::min(std::pow(side, dim), 1e18);
}

// Calls f(p) for every lattice point with |p|^2 <= r2, cube-ordered.
template <class F>
void for_each_in_ball(int dim, int radius, F&& f) {
  const long long r2 = (long long)radius * radius;
  Site p{0, 0, 0};
  const int lo1 = dim >= 2 ? -radius : 0, hi1 = dim >= 2 ? radius : 0;
  const int lo2 = dim >= 3 ? -radius : 0, hi2 = dim >= 3 ? radius : 0;
  for (int a = -radius; a <= radius; ++a)
    for (int b = lo1; b <= hi1; ++b)
      for (int c = lo2; c <= hi2; ++c) {
        p = {a, b, c};
        if (norm2(p, dim) <= r2) f(p);
      }
}

}  // namespace

double normalizing_tail_bound(int dim, double theta, double radius) {
  const double sd = std::sqrt(double(dim));
  const double a = radius - sd;
  if (a < 0.5 * sd || a <= 0.0) return std::numeric_limits<double>::infinity();
  // Cube-by-cube comparison with the radial integral; see the derivation
  // accompanying the tail test.
  const double gamma_upper = boost::math::tgamma(dim / theta, std::pow(a, theta));
  return unit_sphere_area(dim) * std::pow(2.0, dim - 1) * gamma_upper / theta;
}

NormalizingConstant normalizing_constant_detail(int dim, double theta, double tol) {
  require(dim >= 1 && dim <= kMaxDim, "normalizing_constant: dimension must be 1..3");
  require(theta > 0.0, "normalizing_constant: theta must be positive");
  require(tol > 0.0, "normalizing_constant: tol must be positive");

  int radius = std::max(2, int(std::ceil(2.0 * std::sqrt(double(dim)))));
  while (normalizing_tail_bound(dim, theta, radius) > tol) {
    if (ball_point_estimate(dim, radius) > kMaxEnumeratedPoints)
      throw WorkBoundExceeded("normalizing_constant: enumeration radius overflow (tol too small for theta)");
    radius *= 2;
  }
  int lo = radius / 2, hi = radius;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (normalizing_tail_bound(dim, theta, mid) <= tol) hi = mid;
    else lo = mid;
  }
  radius = hi;
  if (ball_point_estimate(dim, radius) > kMaxEnumeratedPoints)
    throw WorkBoundExceeded("normalizing_constant: enumeration radius overflow (tol too small for theta)");

  // Accumulate by squared-norm shell, smallest terms first.
  std::vector<long long> shell_count;
  for_each_in_ball(dim, radius, [&](const Site& p) {
    const auto n2 = std::size_t(norm2(p, dim));
    if (n2 >= shell_count.size()) shell_count.resize(n2 + 1, 0);
    ++shell_count[n2];
  });
  double z = 0.0;
  for (std::size_t n2 = shell_count.size(); n2-- > 0;)
    if (shell_count[n2]) z += double(shell_count[n2]) * std::exp(-std::pow(std::sqrt(double(n2)), theta));
  return {z, normalizing_tail_bound(dim, theta, radius), radius};
}

DisplacementLaw::DisplacementLaw(int dim, double theta, double mass_tol) : dim_(dim), theta_(theta) {
  const double ztol = std::min(1e-13, mass_tol * 1e-2);
  z_ = normalizing_constant(dim, theta, ztol);
  log_z_ = std::log(z_);

  // Smallest radius holding mass >= 1 - mass_tol, found through the tail bound.
  int radius = std::max(2, int(std::ceil(2.0 * std::sqrt(double(dim)))));
  while (normalizing_tail_bound(dim, theta, radius) > mass_tol * z_) radius *= 2;

  std::vector<std::pair<long long, Site>> pts;
  for_each_in_ball(dim, radius, [&](const Site& p) { pts.emplace_back(norm2(p, dim), p); });
  std::sort(pts.begin(), pts.end());

  double cum = 0.0;
  std::size_t shell_begin = 0;
  for (std::size_t i = 0; i < pts.size();) {
    const long long n2 = pts[i].first;
    shell_begin = i;
    const double w = std::exp(-std::pow(std::sqrt(double(n2)), theta)) / z_;
    for (; i < pts.size() && pts[i].first == n2; ++i) {
      atoms_.push_back(pts[i].second);
      cum += w;
      cumulative_.push_back(cum);
    }
    if (cum >= 1.0 - mass_tol) break;
  }
  // Residual mass goes to the last shell, evenly.
  const std::size_t shell_size = atoms_.size() - shell_begin;
  const double extra = (1.0 - cum) / double(shell_size);
  for (std::size_t j = shell_begin; j < atoms_.size(); ++j)
    cumulative_[j] += extra * double(j - shell_begin + 1);
  cumulative_.back() = 1.0;
}

Site DisplacementLaw::sample(Rng& rng) const {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double u = uni(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return atoms_[std::size_t(it - cumulative_.begin())];
}

double DisplacementLaw::mass(const Site& p) const { return std::exp(-std::pow(norm(p, dim_), theta_)) / z_; }

DisplacementConfig DisplacementConfig::zeros(const LatticeBox& box) {
  DisplacementConfig c;
  c.box_ = box;
  c.xi_.assign(box.size(), Site{0, 0, 0});
  c.present_.assign(box.size(), 1);
  c.count_ = box.size();
  return c;
}

DisplacementConfig DisplacementConfig::empty(const LatticeBox& box) {
  DisplacementConfig c;
  c.box_ = box;
  c.xi_.assign(box.size(), Site{0, 0, 0});
  c.present_.assign(box.size(), 0);
  return c;
}

const Site& DisplacementConfig::xi(const Site& q) const {
  if (!contains(q)) throw CoverageError("DisplacementConfig: site not present");
  return xi_[box_.index(q)];
}

void DisplacementConfig::set(const Site& q, const Site& xi) {
  require(box_.contains(q), "DisplacementConfig::set: site outside bounding box");
  const auto i = box_.index(q);
  if (!present_[i]) {
    present_[i] = 1;
    ++count_;
  }
  Site v = xi;
  for (int a = box_.dim; a < kMaxDim; ++a) v[a] = 0;
  xi_[i] = v;
}

void DisplacementConfig::erase(const Site& q) {
  if (!box_.contains(q)) return;
  const auto i = box_.index(q);
  if (present_[i]) {
    present_[i] = 0;
    --count_;
    xi_[i] = Site{0, 0, 0};
  }
}

bool DisplacementConfig::covers(const LatticeBox& region) const {
  if (region.empty()) return true;
  if (!box_.contains(region)) return false;
  const std::size_t n = region.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!present_[box_.index(region.site(i))]) return false;
  return true;
}

bool DisplacementConfig::operator==(const DisplacementConfig& o) const {
  if (box_.dim != o.box_.dim || box_.lo != o.box_.lo || box_.hi != o.box_.hi) return false;
  return present_ == o.present_ && xi_ == o.xi_;
}

double displacement_log_weight(const DisplacementConfig& config, double theta, double log_z) {
  return -displacement_cost(config, theta) - double(config.size()) * log_z;
}

double displacement_cost(const DisplacementConfig& config, double theta) {
  double s = 0.0;
  const int d = config.dim();
  config.for_each([&](const Site&, const Site& xi) {
    const double n = norm(xi, d);
    if (n > 0.0) s += std::pow(n, theta);
  });
  return s;
}

DisplacementConfig sample_config(const DisplacementLaw& law, const LatticeBox& sites, Rng& rng) {
  require(law.dim() == sites.dim, "sample_config: dimension mismatch");
  DisplacementConfig c = DisplacementConfig::zeros(sites);
  const std::size_t n = sites.size();
  for (std::size_t i = 0; i < n; ++i) c.set(sites.site(i), law.sample(rng));
  return c;
}

void write_config(std::ostream& os, const DisplacementConfig& config) {
  const int d = config.dim();
  config.for_each([&](const Site& q, const Site& xi) {
    for (int i = 0; i < d; ++i) os << (i ? " " : "") << q[i];
    os << " :";
    for (int i = 0; i < d; ++i) os << ' ' << xi[i];
    os << '\n';
  });
}

DisplacementConfig read_config(std::istream& is, int dim) {
  std::vector<std::pair<Site, Site>> entries;
  std::string line;
  Site lo{0, 0, 0}, hi{0, 0, 0};
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw InvalidArgument("read_config: missing ':' in line '" + line + "'");
    std::istringstream lhs(line.substr(0, colon)), rhs(line.substr(colon + 1));
    Site q{0, 0, 0}, xi{0, 0, 0};
    for (int i = 0; i < dim; ++i)
      if (!(lhs >> q[i]) || !(rhs >> xi[i])) throw InvalidArgument("read_config: malformed line '" + line + "'");
    std::string extra;
    if (lhs >> extra || rhs >> extra) throw InvalidArgument("read_config: too many coordinates in '" + line + "'");
    for (int i = 0; i < dim; ++i) {
      lo[i] = first ? q[i] : std::min(lo[i], q[i]);
      hi[i] = first ? q[i] : std::max(hi[i], q[i]);
    }
    first = false;
    entries.emplace_back(q, xi);
  }
  if (first) return DisplacementConfig::empty(LatticeBox::cube(dim, 0, -1));
  DisplacementConfig c = DisplacementConfig::empty(LatticeBox::from_bounds(dim, lo, hi));
  for (const auto& [q, xi] : entries) {
    if (c.contains(q)) throw InvalidArgument("read_config: duplicate site");
    c.set(q, xi);
  }
  return c;
}

}  // namespace pamlab::model
