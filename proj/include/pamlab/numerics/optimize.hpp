#pragma once

#include <functional>

namespace pamlab::numerics {

struct Minimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a unimodal function on [a, b].
Minimum golden_section(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                       int max_iter = 500);

/// Global minimum of a possibly multimodal function on [a, b]: grid scan with
/// `grid` points (geometric spacing when `log_spaced` and a > 0), then
/// golden-section refinement around each discrete local minimum of the scan
/// (the eight lowest).  Endpoints are always candidates.
Minimum scan_then_refine(const std::function<double(double)>& f, double a, double b, int grid = 64,
                         bool log_spaced = false, double tol = 1e-12);

}  // namespace pamlab::numerics
