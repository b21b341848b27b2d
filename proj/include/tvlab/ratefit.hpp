#pragma once

#include <utility>
#include <vector>

namespace tvlab {

/// Least-squares fit of log y = intercept + slope * log x.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;  // (x, y), sorted by x
};

/// Needs >= 3 points with positive coordinates and at least two distinct x.
/// Points are put in canonical order first, so any permutation of the input
/// gives the same bits.
RateFit fit_loglog(std::vector<std::pair<double, double>> points);

/// |slope - target| <= tol + 2 * stderr_slope.
bool compare_exponent(const RateFit& fit, double target, double tol);

}  // namespace tvlab
