#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "tvlab/errors.hpp"

namespace tvlab {

/// Numerical-integration knobs shared by the kernel, spectral and
/// experiment layers.
///
/// `grading_exponent` controls the algebraic grading of the 1-D rules used
/// on singular integrands; `panel_grading` controls the Galerkin panel
/// layout on [0,1]. The left truncation point is optional: when unset it is
/// derived from the analytic tail bound (see `resolve_truncation_left`).
struct QuadratureConfig {
  std::optional<double> truncation_left;
  int panels_per_unit = 64;
  double grading_exponent = 3.0;
  double panel_grading = 1.5;
  double tail_growth = 1.25;
  int nodes_per_panel = 10;
  double abs_tol = 1e-6;
  double rel_tol = 1e-9;

  void validate() const;
};

/// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule (Newton iteration on P_n, accurate to ~1 ulp).
const GaussLegendre& gauss_legendre(int n);

/// A flattened quadrature rule on some interval.
struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
  void append(const QuadRule& other);
};

enum class Cluster { None, Left, Right, Both };

/// Composite Gauss-Legendre rule on [a, b] with `panels` panels whose
/// breakpoints follow t^grading toward the clustered end(s).
QuadRule graded_rule(double a, double b, int panels, double grading, int nodes,
                     Cluster cluster);

/// Breakpoints of the same graded partition (panels + 1 values).
std::vector<double> graded_breakpoints(double a, double b, int panels,
                                       double grading, Cluster cluster);

template <class F>
double apply_rule(const QuadRule& rule, F&& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.w[i] * f(rule.x[i]);
  return sum;
}

/// Integrate f over [a, b] on a graded mesh, doubling the panel count until
/// two successive levels agree to cfg.rel_tol. Throws ToleranceError when the
/// refinement stalls.
template <class F>
double integrate_graded(F&& f, double a, double b, Cluster cluster,
                        const QuadratureConfig& cfg, int start_panels = 0) {
  if (!(b > a)) return 0.0;
  int panels = start_panels > 0 ? start_panels : cfg.panels_per_unit;
  constexpr int kMaxDoublings = 8;
  double coarse = apply_rule(
      graded_rule(a, b, panels, cfg.grading_exponent, cfg.nodes_per_panel, cluster), f);
  for (int level = 0; level < kMaxDoublings; ++level) {
    panels *= 2;
    const double fine = apply_rule(
        graded_rule(a, b, panels, cfg.grading_exponent, cfg.nodes_per_panel, cluster), f);
    if (std::abs(fine - coarse) <= cfg.rel_tol * std::abs(fine) || fine == coarse) return fine;
    coarse = fine;
  }
  throw ToleranceError("graded quadrature did not reach rel_tol");
}

/// u_hi^e - u_lo^e for u_hi >= u_lo, with negative arguments clamped to 0.
/// Uses expm1/log1p when both are positive so that far-separated arguments
/// keep full relative accuracy.
double power_difference(double u_hi, double u_lo, double e);

}  // namespace tvlab
