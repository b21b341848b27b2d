#include "tvlab/ratefit.hpp"

#include <algorithm>
#include <cmath>

#include "tvlab/errors.hpp"

namespace tvlab {

RateFit fit_loglog(std::vector<std::pair<double, double>> points) {
  if (points.size() < 3) throw DomainError("fit_loglog needs at least 3 points");
  for (const auto& [x, y] : points)
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
      throw DomainError("fit_loglog needs positive finite coordinates");
  std::sort(points.begin(), points.end());

  // Logs are taken relative to the first point; rescaling y by a power of two
  // then leaves every ly bit-identical.
  const double x0 = points.front().first, y0 = points.front().second;
  const std::size_t m = points.size();
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    lx[i] = std::log(points[i].first / x0);
    ly[i] = std::log(points[i].second / y0);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_loglog: all x coincide");

  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = std::log(y0) + my - fit.slope * (std::log(x0) + mx);
  double sse = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ly[i] - my - fit.slope * (lx[i] - mx);
    sse += r * r;
  }
  fit.stderr_slope = std::sqrt(sse / static_cast<double>(m - 2) / sxx);
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.points = std::move(points);
  return fit;
}

bool compare_exponent(const RateFit& fit, double target, double tol) {
  return std::abs(fit.slope - target) <= tol + 2.0 * fit.stderr_slope;
}

}  // namespace tvlab
