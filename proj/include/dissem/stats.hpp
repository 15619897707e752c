// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "dissem/errors.hpp"

namespace dissem {

struct RegressionFit {
  double intercept = 0;  // alpha-hat
  double slope = 0;      // beta-hat
  double r_squared = 0;
  double residual_se = 0;
  long n_points = 0;
};

/// Ordinary least squares of y on log2(N) over per-run samples
/// (N, makespan in rounds). Needs at least two distinct N values.
inline RegressionFit fit_loglinear(
    const std::vector<std::pair<long, double>>& points) {
  std::set<long> distinct;
  for (const auto& [n, y] : points) {
    detail::check(n >= 1, "sample with nonpositive N");
    distinct.insert(n);
  }
  if (distinct.size() < 2)
    throw DegenerateDesign("need samples at two or more N values");

  const auto n = static_cast<double>(points.size());
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [N, y] : points) {
    long double x = std::log2(static_cast<long double>(N));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  long double denom = n * sxx - sx * sx;
  RegressionFit fit;
  fit.n_points = static_cast<long>(points.size());
  fit.slope = static_cast<double>((n * sxy - sx * sy) / denom);
  fit.intercept = static_cast<double>((sy - fit.slope * sx) / n);

  long double sse = 0, sst = 0;
  long double ybar = sy / n;
  for (const auto& [N, y] : points) {
    long double x = std::log2(static_cast<long double>(N));
    long double e = y - (fit.intercept + fit.slope * x);
    sse += e * e;
    sst += (y - ybar) * (y - ybar);
  }
  fit.r_squared = sst == 0 ? 1.0 : static_cast<double>(1.0L - sse / sst);
  fit.residual_se = points.size() > 2
                        ? static_cast<double>(
                              std::sqrt(sse / (n - 2)))
                        : 0.0;
  return fit;
}

}  // namespace dissem
