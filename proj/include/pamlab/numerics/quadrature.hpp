#pragma once

#include <functional>

namespace pamlab::numerics {

struct Integral {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
  bool converged = true;
};

/// Adaptive Simpson quadrature with Richardson correction.
Integral adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                          int max_depth = 48, int max_evaluations = 20'000'000);

}  // namespace pamlab::numerics
