#include "tvlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tvlab {

namespace {

bool in_open_unit_half(double h) { return h > 0.5 && h < 1.0; }

}  // namespace

HurstPair::HurstPair(double h1, double h2) : h1_(h1), h2_(h2) {
  if (!in_open_unit_half(h1) || !in_open_unit_half(h2))
    throw DomainError("Hurst indices must lie in (1/2, 1)");
  // Small slack so that 0.75 + 0.75 is not rejected by rounding.
  if (h1 + h2 < 1.5 - 1e-14) throw DomainError("h1 + h2 must be at least 3/2");
}

HurstPair HurstPair::for_paths(double h1, double h2) {
  auto ok = [](double h) { return h >= 0.5 && h < 1.0; };
  if (!ok(h1) || !ok(h2)) throw DomainError("path Hurst indices must lie in [1/2, 1)");
  return HurstPair(h1, h2, Unchecked{});
}

HurstPair HurstPair::swapped() const { return HurstPair(h2_, h1_, Unchecked{}); }

KernelSpec KernelSpec::f_infinity(const HurstPair& h) {
  return KernelSpec{h, KernelKind::FInfinity, 0, 1.0};
}

KernelSpec KernelSpec::f_n(const HurstPair& h, int n) {
  if (n < 1) throw DomainError("f_n requires n >= 1");
  return KernelSpec{h, KernelKind::FN, n, 1.0};
}

KernelSpec KernelSpec::scaled(const KernelSpec& base, double factor) {
  if (!std::isfinite(factor)) throw DomainError("scale factor must be finite");
  KernelSpec out = base;
  out.factor *= factor;
  return out;
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (factor != 1.0) os << factor << "*";
  if (kind == KernelKind::FInfinity)
    os << "f_inf";
  else
    os << "f_n(n=" << n << ")";
  os << "[h1=" << hurst.h1() << ",h2=" << hurst.h2() << "]";
  return os.str();
}

double c_alpha(double alpha) {
  if (!(alpha > -1.0 && alpha < -0.5)) throw DomainError("c_alpha needs alpha in (-1, -1/2)");
  return std::beta(alpha + 1.0, -2.0 * alpha - 1.0);
}

// ---------------------------------------------------------------------------
// Rectangle integrals of oriented powers

namespace {

double Phi(double u, const OrientedPower& f) {
  const double e = f.exponent + 2.0;
  double v = 0.0;
  if (u > 0.0)
    v = f.right * std::pow(u, e);
  else if (u < 0.0)
    v = f.left * std::pow(-u, e);
  return v / ((f.exponent + 1.0) * e);
}

// s entirely to the right of t with gap >= half the narrower width.
// Integrate the wider variable in closed form, the narrower one by Gauss-Legendre.
double separated_rect(Interval s, Interval t, double coeff, double p) {
  constexpr int kNodes = 20;
  const auto& gl = gauss_legendre(kNodes);
  const double e = p + 1.0;
  double sum = 0.0;
  if (s.width() <= t.width()) {
    const double mid = 0.5 * (s.lo + s.hi), half = 0.5 * s.width();
    for (int i = 0; i < kNodes; ++i) {
      const double x = mid + half * gl.nodes[i];
      sum += gl.weights[i] * power_difference(x - t.lo, x - t.hi, e);
    }
    sum *= half;
  } else {
    const double mid = 0.5 * (t.lo + t.hi), half = 0.5 * t.width();
    for (int i = 0; i < kNodes; ++i) {
      const double y = mid + half * gl.nodes[i];
      sum += gl.weights[i] * power_difference(s.hi - y, s.lo - y, e);
    }
    sum *= half;
  }
  return coeff * sum / e;
}

OrientedPower mirrored(const OrientedPower& f) { return {f.left, f.right, f.exponent}; }

}  // namespace

double oriented_rect(Interval s, Interval t, const OrientedPower& phi) {
  if (!(phi.exponent > -1.0)) throw DomainError("rectangle integral needs exponent > -1");
  if (s.hi < s.lo || t.hi < t.lo) throw DomainError("interval endpoints out of order");
  const double ws = s.width(), wt = t.width();
  if (ws == 0.0 || wt == 0.0) return 0.0;

  const double narrow = std::min(ws, wt);
  if (s.lo >= t.hi && s.lo - t.hi >= 0.5 * narrow)
    return separated_rect(s, t, phi.right, phi.exponent);
  if (t.lo >= s.hi && t.lo - s.hi >= 0.5 * narrow)
    return separated_rect(t, s, phi.left, phi.exponent);

  // Very unequal widths: peel off the far parts of the wide interval so the
  // remaining near block is comparable in size and the difference formula
  // does not cancel.
  if (wt > 4.0 * ws) {
    double total = 0.0;
    const double cut_lo = std::max(t.lo, s.lo - ws), cut_hi = std::min(t.hi, s.hi + ws);
    if (cut_lo > t.lo) total += oriented_rect(s, {t.lo, cut_lo}, phi);
    if (cut_hi > cut_lo) total += oriented_rect(s, {cut_lo, cut_hi}, phi);
    if (t.hi > cut_hi) total += oriented_rect(s, {cut_hi, t.hi}, phi);
    return total;
  }
  if (ws > 4.0 * wt) return oriented_rect(t, s, mirrored(phi));

  return Phi(s.hi - t.lo, phi) - Phi(s.hi - t.hi, phi) - Phi(s.lo - t.lo, phi) +
         Phi(s.lo - t.hi, phi);
}

double rect_power_integral(Interval s, Interval t, double gamma) {
  if (!(gamma > -1.0)) throw DomainError("rect_power_integral needs gamma > -1");
  return oriented_rect(s, t, {1.0, 1.0, gamma});
}

PairingConstants pairing_constants(const HurstPair& h, bool transposed) {
  const double a1 = h.a1(), a2 = h.a2();
  if (!transposed) {
    const double c1 = c_alpha(a1), c2 = c_alpha(a2);
    return {{c1, c1, 2.0 * h.h1() - 2.0}, {c2, c2, 2.0 * h.h2() - 2.0}};
  }
  // K_{a1,a2}(s,t) = int (s-x)_+^{a1} (t-x)_+^{a2} dx
  //   = B(a2+1, q)|s-t|^p for s > t, B(a1+1, q)|s-t|^p for s < t.
  const double p = a1 + a2 + 1.0, q = -p;
  const double b1 = std::beta(a1 + 1.0, q), b2 = std::beta(a2 + 1.0, q);
  return {{b2, b1, p}, {b1, b2, p}};
}

// ---------------------------------------------------------------------------
// Pointwise evaluation

namespace {

double block_power_integral(double lo, double hi, double x, double a) {
  return power_difference(hi - x, lo - x, a + 1.0) / (a + 1.0);
}

double eval_f_infinity(const HurstPair& h, double x, double y, const QuadratureConfig& cfg) {
  const double a1 = h.a1(), a2 = h.a2();
  if (x == y) {
    if (x >= 0.0) return std::numeric_limits<double>::infinity();
    const double e = a1 + a2 + 1.0;
    return power_difference(1.0 - x, -x, e) / e;
  }
  const bool x_is_max = x > y;
  const double m = x_is_max ? x : y, o = x_is_max ? y : x;
  const double am = x_is_max ? a1 : a2, ao = x_is_max ? a2 : a1;
  const double lo = std::max(m, 0.0);
  // u = (s - m)^{am+1} absorbs the endpoint singularity.
  const double k = 1.0 / (am + 1.0);
  const double u_lo = std::pow(lo - m, am + 1.0), u_hi = std::pow(1.0 - m, am + 1.0);
  auto integrand = [&](double u) {
    const double s = m + std::pow(u, k);
    return k * std::pow(s - o, ao);
  };
  return integrate_graded(integrand, u_lo, u_hi, Cluster::Left, cfg, 16);
}

double eval_f_n(const HurstPair& h, int n, double x, double y) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) / n, hi = static_cast<double>(i + 1) / n;
    if (hi <= x || hi <= y) continue;
    sum += block_power_integral(lo, hi, x, h.a1()) * block_power_integral(lo, hi, y, h.a2());
  }
  return n * sum;
}

}  // namespace

double eval_kernel(const KernelSpec& spec, double x, double y, const QuadratureConfig& cfg) {
  if (std::isnan(x) || std::isnan(y)) throw DomainError("eval_kernel: NaN argument");
  if (x >= 1.0 || y >= 1.0) return 0.0;
  double v = spec.kind == KernelKind::FInfinity ? eval_f_infinity(spec.hurst, x, y, cfg)
                                                : eval_f_n(spec.hurst, spec.n, x, y);
  if (std::isinf(v)) return spec.factor == 0.0 ? 0.0 : std::copysign(v, spec.factor);
  return spec.factor * v;
}

// ---------------------------------------------------------------------------
// Inner products

namespace {

// g(z) = int_0^1 phi(u - z) du.
double unit_block_profile(double z, const OrientedPower& f) {
  const double e = f.exponent + 1.0;
  return (f.right * power_difference(1.0 - z, -z, e) + f.left * power_difference(z, z - 1.0, e)) / e;
}

double pairing_inf_inf(const PairingConstants& pc) {
  const OrientedPower prod{pc.s.right * pc.t.right, pc.s.left * pc.t.left,
                           pc.s.exponent + pc.t.exponent};
  if (!(prod.exponent > -1.0)) throw DomainError("||f_inf|| diverges: need h1 + h2 > 3/2");
  return oriented_rect({0.0, 1.0}, {0.0, 1.0}, prod);
}

double pairing_n_n_same(const PairingConstants& pc, int n) {
  double sum = 0.0;
  for (int k = -(n - 1); k <= n - 1; ++k) {
    const Interval other{static_cast<double>(k), static_cast<double>(k + 1)};
    sum += (n - std::abs(k)) * oriented_rect({0.0, 1.0}, other, pc.s) *
           oriented_rect({0.0, 1.0}, other, pc.t);
  }
  return std::pow(static_cast<double>(n), -pc.s.exponent - pc.t.exponent - 2.0) * sum;
}

double pairing_n_m(const PairingConstants& pc, int n, int m) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const Interval bi{static_cast<double>(i) / n, static_cast<double>(i + 1) / n};
    for (int j = 0; j < m; ++j) {
      const Interval bj{static_cast<double>(j) / m, static_cast<double>(j + 1) / m};
      sum += oriented_rect(bi, bj, pc.s) * oriented_rect(bi, bj, pc.t);
    }
  }
  return static_cast<double>(n) * m * sum;
}

double pairing_n_inf(const PairingConstants& pc, int n, const QuadratureConfig& cfg) {
  if (!(pc.s.exponent + pc.t.exponent > -1.0))
    throw DomainError("<f_n, f_inf> requires h1 + h2 > 3/2");
  auto integrand_at = [&](int k) {
    return [&pc, k](double w) {
      const double z = k + w;
      return unit_block_profile(z, pc.s) * unit_block_profile(z, pc.t);
    };
  };
  const int start = std::max(4, cfg.panels_per_unit / 8);
  double sum = 0.0;
  for (int k = -(n - 1); k <= n - 1; ++k) {
    double J;
    if (k == 0)
      J = integrate_graded(integrand_at(k), 0.0, 1.0, Cluster::Both, cfg, start);
    else if (k == 1)
      J = integrate_graded(integrand_at(k), 0.0, 1.0, Cluster::Left, cfg, start);
    else if (k == -1)
      J = integrate_graded(integrand_at(k), 0.0, 1.0, Cluster::Right, cfg, start);
    else
      J = apply_rule(graded_rule(0.0, 1.0, 1, 1.0, 24, Cluster::None), integrand_at(k));
    sum += (n - std::abs(k)) * J;
  }
  return std::pow(static_cast<double>(n), -pc.s.exponent - pc.t.exponent - 2.0) * sum;
}

double pairing(const KernelSpec& a, const KernelSpec& b, bool transposed,
               const QuadratureConfig& cfg) {
  if (!(a.hurst == b.hurst)) throw DomainError("kernel specs must share one HurstPair");
  const double scale = a.factor * b.factor;
  if (scale == 0.0) return 0.0;
  const auto pc = pairing_constants(a.hurst, transposed);
  double v;
  if (a.kind == KernelKind::FInfinity && b.kind == KernelKind::FInfinity)
    v = pairing_inf_inf(pc);
  else if (a.kind == KernelKind::FN && b.kind == KernelKind::FN)
    v = a.n == b.n ? pairing_n_n_same(pc, a.n) : pairing_n_m(pc, a.n, b.n);
  else
    v = pairing_n_inf(pc, a.kind == KernelKind::FN ? a.n : b.n, cfg);
  return scale * v;
}

}  // namespace

double inner_product(const KernelSpec& a, const KernelSpec& b, const QuadratureConfig& cfg) {
  return pairing(a, b, false, cfg);
}

double inner_product_transposed(const KernelSpec& a, const KernelSpec& b,
                                const QuadratureConfig& cfg) {
  return pairing(a, b, true, cfg);
}

double inner_product_sym(const KernelSpec& a, const KernelSpec& b, const QuadratureConfig& cfg) {
  return 0.5 * (pairing(a, b, false, cfg) + pairing(a, b, true, cfg));
}

double l2_distance(const KernelSpec& a, const KernelSpec& b, const QuadratureConfig& cfg) {
  const double d2 = inner_product(a, a, cfg) - 2.0 * inner_product(a, b, cfg) +
                    inner_product(b, b, cfg);
  return std::sqrt(std::max(d2, 0.0));
}

double l2_distance_sym(const KernelSpec& a, const KernelSpec& b, const QuadratureConfig& cfg) {
  const double d2 = inner_product_sym(a, a, cfg) - 2.0 * inner_product_sym(a, b, cfg) +
                    inner_product_sym(b, b, cfg);
  return std::sqrt(std::max(d2, 0.0));
}

// ---------------------------------------------------------------------------
// Truncation

namespace {

// Coefficient C and decay e in the one-sided tail bound C * |L|^(-e).
struct TailTerm {
  double coeff;
  double decay;
};

TailTerm tail_term(double h_far, double h_near) {
  // Far coordinate below L: (s-x)^{a} ~ |x|^{a}, the other factor integrates
  // to c_{a_near} * int int |s-s'|^{2 h_near - 2} = c / (h_near (2 h_near - 1)).
  const double c = c_alpha(h_near - 1.5) / (h_near * (2.0 * h_near - 1.0));
  const double decay = 2.0 - 2.0 * h_far;
  return {c / decay, decay};
}

}  // namespace

double truncation_tail_bound(const HurstPair& h, double left) {
  if (!(left < 0.0)) throw DomainError("truncation point must be negative");
  const TailTerm t1 = tail_term(h.h1(), h.h2()), t2 = tail_term(h.h2(), h.h1());
  return t1.coeff * std::pow(-left, -t1.decay) + t2.coeff * std::pow(-left, -t2.decay);
}

double resolve_truncation_left(const HurstPair& h, const QuadratureConfig& cfg) {
  if (cfg.truncation_left) return *cfg.truncation_left;
  const TailTerm t1 = tail_term(h.h1(), h.h2()), t2 = tail_term(h.h2(), h.h1());
  // Give each one-sided term half the budget.
  const double l1 = std::pow(2.0 * t1.coeff / cfg.abs_tol, 1.0 / t1.decay);
  const double l2 = std::pow(2.0 * t2.coeff / cfg.abs_tol, 1.0 / t2.decay);
  const double left = -std::max({l1, l2, 1.0});
  if (!std::isfinite(left)) throw DomainError("tail bound gives no finite truncation point");
  return left;
}

}  // namespace tvlab
