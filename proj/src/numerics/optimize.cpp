#include "pamlab/numerics/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pamlab::numerics {

Minimum golden_section(const std::function<double(double)>& f, double a, double b, double tol, int max_iter) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  for (int it = 0; it < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc < fd ? Minimum{c, fc, evals} : Minimum{d, fd, evals};
}

Minimum scan_then_refine(const std::function<double(double)>& f, double a, double b, int grid, bool log_spaced,
                         double tol) {
  if (grid < 3) grid = 3;
  std::vector<double> xs(grid);
  const bool geometric = log_spaced && a > 0.0;
  for (int i = 0; i < grid; ++i) {
    const double s = double(i) / double(grid - 1);
    xs[i] = geometric ? a * std::pow(b / a, s) : a + s * (b - a);
  }
  std::vector<double> fs(grid);
  for (int i = 0; i < grid; ++i) fs[i] = f(xs[i]);
  int best = 0;
  for (int i = 1; i < grid; ++i)
    if (fs[i] < fs[best]) best = i;
  // Refine every discrete local minimum, best first, up to kMaxBasins.
  constexpr int kMaxBasins = 8;
  std::vector<int> basins;
  for (int i = 0; i < grid; ++i) {
    const bool left = i == 0 || fs[i] <= fs[i - 1];
    const bool right = i == grid - 1 || fs[i] <= fs[i + 1];
    if (left && right) basins.push_back(i);
  }
  std::sort(basins.begin(), basins.end(), [&](int a, int b) { return fs[a] < fs[b]; });
  if (basins.size() > kMaxBasins) basins.resize(kMaxBasins);
  Minimum m{xs[best], fs[best], grid};
  for (int i : basins) {
    const double lo = xs[i > 0 ? i - 1 : 0];
    const double hi = xs[i < grid - 1 ? i + 1 : grid - 1];
    const Minimum g = golden_section(f, lo, hi, tol);
    m.evaluations += g.evaluations;
    if (g.value < m.value) {
      m.x = g.x;
      m.value = g.value;
    }
  }
  return m;
}

}  // namespace pamlab::numerics
