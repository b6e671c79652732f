#include "pamlab/meo/meo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <set>

#include "pamlab/constants/constants.hpp"
#include "pamlab/core/error.hpp"

namespace pamlab::meo {
namespace {

long long floor_div(long long a, long long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

bool is_integer_scale(double r) { return r == std::floor(r) && r >= 1.0 && r < 1e9; }

double mu_for(const model::ModelParams& p) {
  if (model::nearly_equal(p.alpha, p.dim + 2.0)) return 1.0;
  return constants::mu_exponent(p.dim, p.alpha);
}

}  // namespace

int n_beta(double beta, double r) {
  require(beta > 0.0, "n_beta: beta must be positive");
  require(r > 1.0, "n_beta: r must exceed 1");
  int n = int(std::floor(beta * std::log(r) / std::log(2.0)));
  const double target = std::pow(r, -beta);
  // Repair floating-point drift so that 2^(-n-1) < r^-beta <= 2^-n.
  while (std::ldexp(1.0, -n) < target) --n;
  while (std::ldexp(1.0, -n - 1) >= target) ++n;
  return n;
}

bool meo_params_feasible(const MeoParams& p, int d, double theta, double mu) {
  const double dd = d;
  const double lo = (mu - 2.0 / dd) * theta;
  const bool chi_ok = p.chi > lo && p.chi < mu * theta &&
                      p.chi > lo + 2.0 * p.eta * p.eta + (dd - 2.0 + 2.0 * theta / dd) * p.eta;
  const bool eta_ok = p.eta > 0.0 && p.eta < 1.0;
  const bool gamma_ok = std::abs(p.gamma_meo - ((dd - 2.0) / dd + 2.0 * p.eta / dd)) < 1e-15 && p.gamma_meo > 0.0 &&
                        p.gamma_meo < 1.0;
  return chi_ok && eta_ok && gamma_ok;
}

MeoParams choose_meo_params(const model::ModelParams& params) {
  params.validate();
  const int d = params.dim;
  require(d >= 2, "choose_meo_params: requires d >= 2");
  require(params.alpha >= d + 2.0 || model::nearly_equal(params.alpha, d + 2.0) ||
              (d == 2 && model::nearly_equal(params.alpha, 4.0)),
          "choose_meo_params: requires alpha >= d + 2");
  const double theta = params.theta, mu = mu_for(params), dd = d;
  MeoParams p;
  p.chi = (mu - 1.0 / dd) * theta;
  const double slack = theta / dd;  // chi - (mu - 2/d) theta
  const double b = dd - 2.0 + 2.0 * theta / dd;
  p.eta = 0.5;
  while (!(2.0 * p.eta * p.eta + b * p.eta < slack)) {
    p.eta *= 0.5;
    if (p.eta < 1e-12) throw InvalidArgument("choose_meo_params: no feasible eta");
  }
  p.gamma_meo = (dd - 2.0) / dd + 2.0 * p.eta / dd;
  p.cap_M = 10.0 * dd * std::numbers::pi * std::numbers::pi / 2.0;
  if (!meo_params_feasible(p, d, theta, mu)) throw InvalidArgument("choose_meo_params: constraints infeasible");
  return p;
}

LatticeBox classification_sites(int dim, const LatticeBox& cells, double r) {
  Site lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    lo[a] = int(std::floor(r * (cells.lo[a] - 1)));
    hi[a] = int(std::ceil(r * (cells.hi[a] + 2)));
  }
  return LatticeBox::from_bounds(dim, lo, hi);
}

DensityVerdict classify_density_detail(const model::DisplacementConfig& config, double r, const Site& q,
                                       const MeoParams& meo) {
  require(r > 1.0, "classify_density: r must exceed 1");
  const int d = config.dim();
  const LatticeBox need = classification_sites(d, LatticeBox::from_bounds(d, q, q), r);
  if (!config.covers(need)) throw CoverageError("classify_density: configuration does not cover r (q + [-1, 2]^d)");

  DensityVerdict v;
  if (d == 1) {
    v.fine_level = n_beta(1.0, r);
    v.coarse_level = 0;
  } else {
    require(meo.gamma_meo > 0.0 && meo.gamma_meo < 1.0 && meo.eta > 0.0 && meo.eta < 1.0,
            "classify_density: invalid MeoParams");
    v.fine_level = n_beta(meo.gamma_meo, r);
    v.coarse_level = n_beta(meo.eta * meo.gamma_meo, r);
  }
  require(v.fine_level >= 0 && v.fine_level * d <= 24, "classify_density: dyadic level out of range");
  const long long N = 1LL << v.fine_level;
  const std::size_t nboxes = std::size_t(1) << (v.fine_level * d);
  std::vector<unsigned char> hit(nboxes, 0);

  const bool exact = is_integer_scale(r);
  const long long R = exact ? (long long)r : 0;
  auto box_index = [&](const long long* j) {
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a) idx = idx * std::size_t(N) + std::size_t(j[a]);
    return idx;
  };

  for (std::size_t s = 0; s < need.size(); ++s) {
    const Site qp = need.site(s);
    const Site& xi = config.xi(qp);
    // Per axis: candidate sub-box indices whose (shrunk, d >= 2) closed box
    // contains the coordinate of the scaled point.
    long long cand[kMaxDim][2];
    int ncand[kMaxDim];
    bool inside = true;
    for (int a = 0; a < d && inside; ++a) {
      ncand[a] = 0;
      if (exact) {
        const long long num = (long long)qp[a] + xi[a] - R * q[a];  // scaled offset times r
        if (num < 0 || num > R) {
          inside = false;
          break;
        }
        const long long j = floor_div(N * num, R);
        if (d == 1) {
          if (j < N) cand[a][ncand[a]++] = j;
          if (j >= 1 && N * num == j * R) cand[a][ncand[a]++] = j - 1;
        } else if (j < N && 2 * N * num <= (2 * j + 1) * R) {
          cand[a][ncand[a]++] = j;
        }
      } else {
        const long double off = ((long double)qp[a] + xi[a]) / (long double)r - (long double)q[a];
        if (off < 0.0L || off > 1.0L) {
          inside = false;
          break;
        }
        const long long j = (long long)std::floor(off * N);
        if (d == 1) {
          if (j < N) cand[a][ncand[a]++] = j;
          if (j >= 1 && off * N == (long double)j) cand[a][ncand[a]++] = j - 1;
        } else if (j < N && 2.0L * N * off <= 2.0L * j + 1.0L) {
          cand[a][ncand[a]++] = j;
        }
      }
      if (ncand[a] == 0) inside = false;
    }
    if (!inside) continue;
    long long j[kMaxDim] = {0, 0, 0};
    for (int x = 0; x < ncand[0]; ++x)
      for (int y = 0; y < (d > 1 ? ncand[1] : 1); ++y)
        for (int z = 0; z < (d > 2 ? ncand[2] : 1); ++z) {
          j[0] = cand[0][x];
          if (d > 1) j[1] = cand[1][y];
          if (d > 2) j[2] = cand[2][z];
          hit[box_index(j)] = 1;
        }
  }

  if (d == 1) {
    v.failing_coarse_boxes = std::count(hit.begin(), hit.end(), 0) > 0 ? 1 : 0;
    v.density = v.failing_coarse_boxes == 0;
    return v;
  }
  const long long K = 1LL << v.coarse_level;
  const long long sub = N / K;
  const std::size_t per = std::size_t(1) << ((v.fine_level - v.coarse_level) * d);
  const std::size_t need_hits = (per + 1) / 2;
  std::vector<std::size_t> counts(std::size_t(1) << (v.coarse_level * d), 0);
  for (std::size_t idx = 0; idx < nboxes; ++idx) {
    if (!hit[idx]) continue;
    std::size_t rem = idx, cidx = 0, mul = 1;
    for (int a = d - 1; a >= 0; --a) {
      const long long ja = (long long)(rem % std::size_t(N));
      rem /= std::size_t(N);
      cidx += std::size_t(ja / sub) * mul;
      mul *= std::size_t(K);
    }
    ++counts[cidx];
  }
  for (auto c : counts)
    if (c < need_hits) ++v.failing_coarse_boxes;
  v.density = v.failing_coarse_boxes == 0;
  return v;
}

DensityReport classify_box(const model::DisplacementConfig& config, double r, double t, const MeoParams& meo,
                           int nodes_per_cell) {
  require(t > 0.0, "classify_box: t must be positive");
  const int d = config.dim();
  DensityReport rep;
  rep.lambda = spectral::GridDomain::centred_box(d, t / r, nodes_per_cell);
  rep.verdicts.resize(rep.lambda.cells.size());
  std::vector<DensityVerdict> verdicts(rep.lambda.cells.size());
  const std::ptrdiff_t n = std::ptrdiff_t(rep.lambda.cells.size());
  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      verdicts[std::size_t(i)] = classify_density_detail(config, r, rep.lambda.cells[std::size_t(i)], meo);
    } catch (const std::exception& e) {
#pragma omp critical
      failure = e.what();
    }
  }
  if (!failure.empty()) throw CoverageError(failure);
  std::vector<Site> rare;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    rep.verdicts[i] = {rep.lambda.cells[i], verdicts[i].density};
    if (!verdicts[i].density) rare.push_back(rep.lambda.cells[i]);
    rep.levels_collapsed = d >= 2 && verdicts[i].coarse_level == 0;
  }
  rep.rarefied = spectral::GridDomain::from_cells(d, std::move(rare), nodes_per_cell);
  return rep;
}

std::vector<spectral::GridDomain> lattice_animals(const spectral::GridDomain& cells) {
  std::vector<spectral::GridDomain> out;
  const auto& cs = cells.cells;
  std::vector<char> seen(cs.size(), 0);
  for (std::size_t s = 0; s < cs.size(); ++s) {
    if (seen[s]) continue;
    std::vector<Site> comp;
    std::queue<std::size_t> todo;
    todo.push(s);
    seen[s] = 1;
    while (!todo.empty()) {
      const Site c = cs[todo.front()];
      todo.pop();
      comp.push_back(c);
      for (int a = 0; a < cells.dim; ++a)
        for (int sgn : {-1, 1}) {
          Site nb = c;
          nb[a] += sgn;
          auto it = std::lower_bound(cs.begin(), cs.end(), nb);
          if (it != cs.end() && *it == nb) {
            const auto j = std::size_t(it - cs.begin());
            if (!seen[j]) {
              seen[j] = 1;
              todo.push(j);
            }
          }
        }
    }
    out.push_back(spectral::GridDomain::from_cells(cells.dim, std::move(comp), cells.nodes_per_cell, cells.cell_size));
  }
  return out;
}

std::vector<std::vector<Site>> enumerate_animals(const spectral::GridDomain& region, int max_cells) {
  require(max_cells >= 1, "enumerate_animals: max_cells must be >= 1");
  std::set<std::vector<Site>> all;
  std::set<std::vector<Site>> layer;
  for (const auto& c : region.cells) layer.insert({c});
  for (int size = 1; size <= max_cells && !layer.empty(); ++size) {
    all.insert(layer.begin(), layer.end());
    if (size == max_cells) break;
    std::set<std::vector<Site>> next;
    for (const auto& animal : layer)
      for (const auto& c : animal)
        for (int a = 0; a < region.dim; ++a)
          for (int sgn : {-1, 1}) {
            Site nb = c;
            nb[a] += sgn;
            if (!region.contains_cell(nb) || std::binary_search(animal.begin(), animal.end(), nb)) continue;
            auto grown = animal;
            grown.insert(std::upper_bound(grown.begin(), grown.end(), nb), nb);
            next.insert(std::move(grown));
          }
    layer = std::move(next);
  }
  return {all.begin(), all.end()};
}

std::vector<Site> halo_sites(int dim, const std::vector<Site>& animal, double r, double t, double l) {
  require(!animal.empty(), "halo_sites: empty animal");
  const auto dom = spectral::GridDomain::from_cells(dim, animal, 2);
  const LatticeBox cb = dom.cell_bounds();
  const int half = int(std::floor(t / 2.0));
  Site lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    lo[a] = std::max(-half, int(std::floor(r * cb.lo[a] - r * l)));
    hi[a] = std::min(half, int(std::ceil(r * (cb.hi[a] + 1) + r * l)));
  }
  std::vector<Site> out;
  const LatticeBox box = LatticeBox::from_bounds(dim, lo, hi);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Site q = box.site(i);
    if (dom.distance_to(to_point(q), r) < r * l) out.push_back(q);
  }
  return out;
}

std::vector<Site> capped_displacements(int dim, int cap) {
  require(cap >= 0, "capped_displacements: cap must be >= 0");
  std::vector<Site> out;
  const LatticeBox box = LatticeBox::cube(dim, -cap, cap);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Site p = box.site(i);
    if (norm2(p, dim) <= (long long)cap * cap) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [&](const Site& a, const Site& b) {
    const auto na = norm2(a, dim), nb = norm2(b, dim);
    return na != nb ? na < nb : a < b;
  });
  return out;
}

RelevantEnumerator::RelevantEnumerator(double r, double t, const RelevantCaps& caps) {
  require(caps.dim >= 1 && caps.dim <= kMaxDim, "enumerate_relevant: dimension must be 1..3");
  require(caps.max_cells >= 1 && caps.max_cells <= 4, "enumerate_relevant: animal size cap must be 1..4");
  require(caps.displacement_cap >= 0 && caps.displacement_cap <= 2, "enumerate_relevant: displacement cap must be 0..2");
  require(r >= 1.0 && t > 0.0 && caps.halo > 0.0, "enumerate_relevant: bad scale parameters");
  const auto lambda = spectral::GridDomain::centred_box(caps.dim, t / r, 2);
  animals_ = enumerate_animals(lambda, caps.max_cells);
  moves_ = capped_displacements(caps.dim, caps.displacement_cap);
  const long double bound = (long double)caps.work_bound;
  long double total = 0.0L;
  for (const auto& a : animals_) {
    halos_.push_back(halo_sites(caps.dim, a, r, t, caps.halo));
    total += std::pow((long double)moves_.size(), (long double)halos_.back().size());
    if (total > bound) throw WorkBoundExceeded("enumerate_relevant: instance exceeds the work bound; shrink the caps");
  }
  count_ = std::uint64_t(std::llround(total));
}

void RelevantEnumerator::reset() {
  animal_ = 0;
  started_ = false;
  odometer_.clear();
}

bool RelevantEnumerator::next(RelevantPair& out) {
  while (animal_ < animals_.size()) {
    const auto& halo = halos_[animal_];
    if (!started_) {
      odometer_.assign(halo.size(), 0);
      started_ = true;
    } else {
      std::size_t k = 0;
      while (k < odometer_.size() && ++odometer_[k] == moves_.size()) odometer_[k++] = 0;
      if (k == odometer_.size()) {
        ++animal_;
        started_ = false;
        continue;
      }
    }
    out.animal = animals_[animal_];
    out.halo_sites = halo;
    out.zeta.resize(halo.size());
    for (std::size_t i = 0; i < halo.size(); ++i) out.zeta[i] = moves_[odometer_[i]];
    return true;
  }
  return false;
}

VolumeTrial volume_bound_trial(const model::ModelParams& params, double r, double t, const MeoParams& meo,
                               std::size_t n_samples, std::uint64_t seed) {
  params.validate();
  require(n_samples >= 1, "volume_bound_trial: need at least one sample");
  const int d = params.dim;
  const model::DisplacementLaw law(d, params.theta);
  const auto lambda = spectral::GridDomain::centred_box(d, t / r, 2);
  const LatticeBox need = classification_sites(d, lambda.cell_bounds(), r);
  const int half = int(std::floor(t / 2.0));
  Site lo = need.lo, hi = need.hi;
  for (int a = 0; a < d; ++a) {
    lo[a] = std::min(lo[a], -half);
    hi[a] = std::max(hi[a], half);
  }
  const LatticeBox sites = LatticeBox::from_bounds(d, lo, hi);
  const LatticeBox lambda_t = LatticeBox::cube(d, -half, half);

  VolumeTrial out;
  out.samples = n_samples;
  out.bound_exponent = d * (1.0 - meo.eta * meo.gamma_meo) + (1.0 - meo.gamma_meo) * params.theta + meo.chi;
  out.rate = std::pow(r, out.bound_exponent);
  const double threshold = std::pow(r, meo.chi);
  std::vector<char> hit(n_samples, 0);
  std::vector<double> ratio(n_samples, HUGE_VAL);
  const std::ptrdiff_t n = std::ptrdiff_t(n_samples);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    Rng rng = derive_stream(seed, std::uint64_t(s));
    const auto config = model::sample_config(law, sites, rng);
    const auto rep = classify_box(config, r, t, meo, 2);
    if (double(rep.rarefied.cells.size()) >= threshold) {
      hit[std::size_t(s)] = 1;
      double cost = 0.0;
      for (std::size_t i = 0; i < lambda_t.size(); ++i) {
        const Site q = lambda_t.site(i);
        cost += std::pow(norm(config.xi(q), d), params.theta);
      }
      ratio[std::size_t(s)] = cost / out.rate;
    }
  }
  for (std::size_t s = 0; s < n_samples; ++s)
    if (hit[s]) {
      ++out.hits;
      out.min_cost_ratio = std::min(out.min_cost_ratio, ratio[s]);
    }
  out.probability = double(out.hits) / double(n_samples);
  out.wilson = numerics::wilson_interval(out.hits, n_samples);
  return out;
}

namespace {

void write_meo_header(std::ostream& os, const MeoParams& meo) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "# meo chi=%.17g eta=%.17g gamma=%.17g halo_width=%.17g cap_M=%.17g\n", meo.chi,
                meo.eta, meo.gamma_meo, meo.halo_width, meo.cap_M);
  os << buf;
}

}  // namespace

void write_density_csv(std::ostream& os, double r, double t, const MeoParams& meo, const DensityReport& rep) {
  os << "# schema=v1\n";
  write_meo_header(os, meo);
  if (rep.levels_collapsed) os << "# warning: coarse level n_eta_gamma = 0 (the cube itself)\n";
  const int d = rep.lambda.dim;
  os << "r,t,cube,is_density\n";
  char buf[128];
  for (const auto& [c, dens] : rep.verdicts) {
    std::string cube;
    for (int a = 0; a < d; ++a) cube += (a ? " " : "") + std::to_string(c[a]);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", r, t);
    os << buf << cube << ',' << (dens ? 1 : 0) << '\n';
  }
}

void write_volume_csv(std::ostream& os, double r, double t, const MeoParams& meo, const VolumeTrial& tr) {
  os << "# schema=v1\n";
  write_meo_header(os, meo);
  os << "r,t,chi,samples,hits,empirical_probability,wilson_lower,wilson_upper,bound_exponent,min_cost_ratio\n";
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", r, t, meo.chi, tr.samples,
                tr.hits, tr.probability, tr.wilson.lower, tr.wilson.upper, tr.bound_exponent, tr.min_cost_ratio);
  os << buf;
}

}  // namespace pamlab::meo
