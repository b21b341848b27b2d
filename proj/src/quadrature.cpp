#include "tvlab/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace tvlab {

void QuadratureConfig::validate() const {
  if (truncation_left && !(*truncation_left < 0.0))
    throw DomainError("truncation_left must be negative");
  if (panels_per_unit < 1) throw DomainError("panels_per_unit must be positive");
  if (!(grading_exponent >= 1.0)) throw DomainError("grading_exponent must be >= 1");
  if (!(panel_grading >= 1.0)) throw DomainError("panel_grading must be >= 1");
  if (!(tail_growth > 1.0)) throw DomainError("tail_growth must exceed 1");
  if (nodes_per_panel < 1) throw DomainError("nodes_per_panel must be positive");
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("tolerances must be positive");
}

namespace {

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(compute_gauss_legendre(n));
  return *slot;
}

void QuadRule::append(const QuadRule& other) {
  x.insert(x.end(), other.x.begin(), other.x.end());
  w.insert(w.end(), other.w.begin(), other.w.end());
}

std::vector<double> graded_breakpoints(double a, double b, int panels, double grading,
                                       Cluster cluster) {
  std::vector<double> e(panels + 1);
  const double len = b - a;
  for (int k = 0; k <= panels; ++k) {
    const double t = static_cast<double>(k) / panels;
    double g = t;
    switch (cluster) {
      case Cluster::None:
        break;
      case Cluster::Left:
        g = std::pow(t, grading);
        break;
      case Cluster::Right:
        g = 1.0 - std::pow(1.0 - t, grading);
        break;
      case Cluster::Both:
        g = t < 0.5 ? 0.5 * std::pow(2.0 * t, grading)
                    : 1.0 - 0.5 * std::pow(2.0 * (1.0 - t), grading);
        break;
    }
    e[k] = a + len * g;
  }
  e.front() = a;
  e.back() = b;
  return e;
}

QuadRule graded_rule(double a, double b, int panels, double grading, int nodes,
                     Cluster cluster) {
  const auto& gl = gauss_legendre(nodes);
  const auto edges = graded_breakpoints(a, b, panels, grading, cluster);
  QuadRule rule;
  rule.x.reserve(static_cast<std::size_t>(panels) * nodes);
  rule.w.reserve(static_cast<std::size_t>(panels) * nodes);
  for (int p = 0; p < panels; ++p) {
    const double lo = edges[p], hi = edges[p + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < nodes; ++i) {
      // Strong grading squeezes end panels below ulp; a node rounded onto an
      // endpoint would sample the singularity itself. Its weight is negligible.
      const double x = mid + half * gl.nodes[i];
      if (!(x > a && x < b)) continue;
      rule.x.push_back(x);
      rule.w.push_back(half * gl.weights[i]);
    }
  }
  return rule;
}

double power_difference(double u_hi, double u_lo, double e) {
  if (u_hi <= 0.0) return 0.0;
  if (u_lo <= 0.0) return std::pow(u_hi, e);
  return std::pow(u_lo, e) * std::expm1(e * std::log1p((u_hi - u_lo) / u_lo));
}

}  // namespace tvlab
