#include "pamlab/spectral/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_set>

#include "pamlab/core/error.hpp"

namespace pamlab::spectral {
namespace {

Site clean(const Site& s, int dim) {
  Site c = s;
  for (int i = dim; i < kMaxDim; ++i) c[i] = 0;
  return c;
}

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

}  // namespace

GridDomain GridDomain::box(int dim, const Site& lo, const Site& hi, int m, double cell_size) {
  const LatticeBox b = LatticeBox::from_bounds(dim, lo, hi);
  std::vector<Site> cells;
  cells.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) cells.push_back(b.site(i));
  return from_cells(dim, std::move(cells), m, cell_size);
}

GridDomain GridDomain::from_cells(int dim, std::vector<Site> cells, int m, double cell_size) {
  require(dim >= 1 && dim <= kMaxDim, "GridDomain: dimension must be 1..3");
  require(m >= 2, "GridDomain: need at least 2 nodes per cell");
  require(cell_size > 0.0, "GridDomain: cell size must be positive");
  for (auto& c : cells) c = clean(c, dim);
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  GridDomain d;
  d.dim = dim;
  d.cells = std::move(cells);
  d.nodes_per_cell = m;
  d.cell_size = cell_size;
  return d;
}

GridDomain GridDomain::centred_box(int dim, double side, int m) {
  const int L = std::max(1, int(std::lround(side)));
  const int lo = -(L / 2);
  Site a{0, 0, 0}, b{0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    a[i] = lo;
    b[i] = lo + L - 1;
  }
  return box(dim, a, b, m);
}

double GridDomain::volume() const { return double(cells.size()) * std::pow(cell_size, dim); }

bool GridDomain::contains_cell(const Site& c) const {
  return std::binary_search(cells.begin(), cells.end(), clean(c, dim));
}

bool GridDomain::is_face_connected() const {
  if (cells.empty()) return true;
  std::vector<char> seen(cells.size(), 0);
  std::queue<std::size_t> todo;
  todo.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!todo.empty()) {
    const Site c = cells[todo.front()];
    todo.pop();
    for (int a = 0; a < dim; ++a)
      for (int s : {-1, 1}) {
        Site n = c;
        n[a] += s;
        auto it = std::lower_bound(cells.begin(), cells.end(), n);
        if (it != cells.end() && *it == n) {
          const auto j = std::size_t(it - cells.begin());
          if (!seen[j]) {
            seen[j] = 1;
            ++reached;
            todo.push(j);
          }
        }
      }
  }
  return reached == cells.size();
}

LatticeBox GridDomain::cell_bounds() const {
  if (cells.empty()) return LatticeBox::cube(dim, 0, -1);
  Site lo = cells.front(), hi = cells.front();
  for (const auto& c : cells)
    for (int i = 0; i < dim; ++i) {
      lo[i] = std::min(lo[i], c[i]);
      hi[i] = std::max(hi[i], c[i]);
    }
  return LatticeBox::from_bounds(dim, lo, hi);
}

double GridDomain::distance_to(const Point& x, double scale) const {
  double best = std::numeric_limits<double>::infinity();
  const double s = scale * cell_size;
  for (const auto& c : cells) {
    double d2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double lo = s * c[i], hi = s * (c[i] + 1);
      const double e = x[i] < lo ? lo - x[i] : (x[i] > hi ? x[i] - hi : 0.0);
      d2 += e * e;
    }
    best = std::min(best, d2);
    if (best == 0.0) break;
  }
  return std::sqrt(best);
}

Mesh::Mesh(const GridDomain& domain) : domain_(domain), dim_(domain.dim), h_(domain.h()) {
  require(!domain.cells.empty(), "Mesh: empty domain");
  const int m = domain.nodes_per_cell;
  std::unordered_set<Site, SiteHash> cellset(domain.cells.begin(), domain.cells.end());

  // A node is interior iff every cell whose closure contains it is present.
  auto interior = [&](const Site& g) {
    int lo[kMaxDim], cnt[kMaxDim];
    for (int a = 0; a < kMaxDim; ++a) {
      if (a >= dim_) {
        lo[a] = 0;
        cnt[a] = 1;
      } else if (g[a] % m == 0) {
        lo[a] = g[a] / m - 1;
        cnt[a] = 2;
      } else {
        lo[a] = floor_div(g[a], m);
        cnt[a] = 1;
      }
    }
    for (int i = 0; i < cnt[0]; ++i)
      for (int j = 0; j < cnt[1]; ++j)
        for (int k = 0; k < cnt[2]; ++k)
          if (!cellset.count(Site{lo[0] + i, lo[1] + j, lo[2] + k})) return false;
    return true;
  };

  std::unordered_set<Site, SiteHash> seen;
  const int n1 = dim_ >= 2 ? m : 0, n2 = dim_ >= 3 ? m : 0;
  for (const auto& c : domain.cells)
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= n1; ++j)
        for (int k = 0; k <= n2; ++k) {
          const Site g{c[0] * m + i, dim_ >= 2 ? c[1] * m + j : 0, dim_ >= 3 ? c[2] * m + k : 0};
          if (seen.insert(g).second && interior(g)) coords_.push_back(g);
        }
  if (coords_.empty()) throw InvalidArgument("Mesh: domain has no interior nodes");
  std::sort(coords_.begin(), coords_.end());
  index_.reserve(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) index_.emplace(coords_[i], std::int64_t(i));

  neighbors_.assign(coords_.size() * std::size_t(2 * dim_), -1);
  for (std::size_t i = 0; i < coords_.size(); ++i)
    for (int a = 0; a < dim_; ++a)
      for (int s = 0; s < 2; ++s) {
        Site g = coords_[i];
        g[a] += s ? 1 : -1;
        neighbors_[i * std::size_t(2 * dim_) + std::size_t(2 * a + s)] = find(g);
      }
}

double Mesh::cell_volume() const { return std::pow(h_, dim_); }

std::int64_t Mesh::find(const Site& g) const {
  auto it = index_.find(g);
  return it == index_.end() ? -1 : it->second;
}

std::vector<std::vector<std::size_t>> Mesh::components() const {
  std::vector<std::vector<std::size_t>> out;
  std::vector<char> seen(size(), 0);
  for (std::size_t s = 0; s < size(); ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp;
    std::queue<std::size_t> todo;
    todo.push(s);
    seen[s] = 1;
    while (!todo.empty()) {
      const auto i = todo.front();
      todo.pop();
      comp.push_back(i);
      for (auto j : neighbors(i))
        if (j >= 0 && !seen[std::size_t(j)]) {
          seen[std::size_t(j)] = 1;
          todo.push(std::size_t(j));
        }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

bool Mesh::linked_to_next(std::size_t i) const {
  return dim_ == 1 && i + 1 < size() && neighbors(i)[1] == std::int64_t(i + 1);
}

}  // namespace pamlab::spectral
