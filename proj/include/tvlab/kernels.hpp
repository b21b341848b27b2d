#pragma once

#include <string>

#include "tvlab/quadrature.hpp"

namespace tvlab {

/// Hurst indices of the two fBm components.
///
/// The regular constructor requires h1, h2 in (1/2, 1) and h1 + h2 >= 3/2.
/// The boundary h1 + h2 = 3/2 is admitted so that finite-rank objects (f_n,
/// Galerkin matrices) can still be built there; anything involving the
/// L2 norm of f_inf checks `square_integrable()` and rejects the boundary.
class HurstPair {
 public:
  HurstPair(double h1, double h2);

  /// Relaxed pair for path simulation only: h in [1/2, 1), no sum condition.
  static HurstPair for_paths(double h1, double h2);

  double h1() const { return h1_; }
  double h2() const { return h2_; }
  double a1() const { return h1_ - 1.5; }
  double a2() const { return h2_ - 1.5; }
  bool square_integrable() const { return h1_ + h2_ > 1.5; }
  HurstPair swapped() const;

  bool operator==(const HurstPair&) const = default;

 private:
  struct Unchecked {};
  HurstPair(double h1, double h2, Unchecked) : h1_(h1), h2_(h2) {}
  double h1_;
  double h2_;
};

enum class KernelKind { FInfinity, FN };

/// f_inf, f_n, or a scalar multiple of either. Nested scaling is flattened
/// into `factor`.
struct KernelSpec {
  HurstPair hurst;
  KernelKind kind = KernelKind::FInfinity;
  int n = 0;
  double factor = 1.0;

  static KernelSpec f_infinity(const HurstPair& h);
  static KernelSpec f_n(const HurstPair& h, int n);
  static KernelSpec scaled(const KernelSpec& base, double factor);

  std::string describe() const;
};

/// c_alpha = int (1-x)_+^alpha (-x)_+^alpha dx = B(alpha+1, -2 alpha-1).
double c_alpha(double alpha);

/// phi(u) = right * u_+^exponent + left * u_-^exponent.
struct OrientedPower {
  double right = 1.0;
  double left = 1.0;
  double exponent = 0.0;
};

struct Interval {
  double lo;
  double hi;
  double width() const { return hi - lo; }
};

/// int_s int_t phi(s - t) dt ds for an oriented power phi with exponent > -1.
double oriented_rect(Interval s, Interval t, const OrientedPower& phi);

/// int_s int_t |s - t|^gamma dt ds, gamma > -1.
double rect_power_integral(Interval s, Interval t, double gamma);

/// Pair of oriented powers describing one pairing of kernel factors:
/// `s` pairs the first (x) factors, `t` the second (y) factors.
struct PairingConstants {
  OrientedPower s;
  OrientedPower t;
};

/// Constants for <f, g> (transposed = false) or <f, g^T> (transposed = true).
PairingConstants pairing_constants(const HurstPair& h, bool transposed);

/// Pointwise kernel value; +infinity on the diagonal of f_inf inside [0,1).
double eval_kernel(const KernelSpec& spec, double x, double y,
                   const QuadratureConfig& cfg = {});

/// <a, b> in L2(R^2) of the raw (unsymmetrized) kernels.
double inner_product(const KernelSpec& a, const KernelSpec& b,
                     const QuadratureConfig& cfg = {});

/// <a, b^T>, i.e. the pairing with the second argument transposed.
double inner_product_transposed(const KernelSpec& a, const KernelSpec& b,
                                const QuadratureConfig& cfg = {});

/// <sym a, sym b>; this is the pairing that controls I_2.
double inner_product_sym(const KernelSpec& a, const KernelSpec& b,
                         const QuadratureConfig& cfg = {});

double l2_distance(const KernelSpec& a, const KernelSpec& b,
                   const QuadratureConfig& cfg = {});
double l2_distance_sym(const KernelSpec& a, const KernelSpec& b,
                       const QuadratureConfig& cfg = {});

/// Upper bound on the part of ||f_inf||^2 coming from x < left or y < left.
double truncation_tail_bound(const HurstPair& h, double left);

/// cfg.truncation_left when set, otherwise the nearest point where the tail
/// bound drops below cfg.abs_tol.
double resolve_truncation_left(const HurstPair& h, const QuadratureConfig& cfg);

}  // namespace tvlab
