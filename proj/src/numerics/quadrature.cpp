#include "pamlab/numerics/quadrature.hpp"

#include <cmath>

namespace pamlab::numerics {
namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;
  int max_evaluations;
  int evaluations = 0;
  bool converged = true;
  double error = 0.0;

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    evaluations += 2;
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
      error += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    if (depth >= max_depth || evaluations >= max_evaluations) {
      converged = false;
      error += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

Integral adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth,
                          int max_evaluations) {
  Simpson s{f, max_depth, max_evaluations};
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  s.evaluations = 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  Integral out;
  out.value = s.recurse(a, b, fa, fm, fb, whole, tol, 0);
  out.error_estimate = s.error;
  out.evaluations = s.evaluations;
  out.converged = s.converged;
  return out;
}

}  // namespace pamlab::numerics
