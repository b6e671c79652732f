#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace pamlab::numerics {

/// Pairwise (cascade) summation; the result depends only on the element order.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> values);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// Linear-interpolated empirical quantile, q in [0, 1].  Sorts a copy.
double quantile(std::vector<double> values, double q);

}  // namespace pamlab::numerics
