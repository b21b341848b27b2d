#include "tvlab/tv_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tvlab/errors.hpp"

namespace tvlab {

std::string to_string(TvMethod m) { return m == TvMethod::Histogram ? "histogram" : "kde"; }

TvMethod parse_tv_method(const std::string& s) {
  if (s == "histogram") return TvMethod::Histogram;
  if (s == "kde") return TvMethod::Kde;
  throw DomainError("unknown tv method: " + s);
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(i), values.end());
  const double lo = values[i];
  if (i + 1 >= values.size()) return lo;
  const double hi = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(i) + 1, values.end());
  return lo + (pos - static_cast<double>(i)) * (hi - lo);
}

namespace {

constexpr double kClip = 1e-4;
constexpr int kKdeGrid = 2048;

void require_nonempty(const SamplePool& a, const SamplePool& b) {
  if (a.empty() || b.empty()) throw DomainError("tv estimate needs two nonempty pools");
}

std::pair<double, double> pooled_range(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled;
  pooled.reserve(a.size() + b.size());
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  return {empirical_quantile(pooled, kClip), empirical_quantile(pooled, 1.0 - kClip)};
}

std::vector<double> bin_frequencies(const std::vector<double>& v, double lo, double hi, int bins) {
  std::vector<double> f(static_cast<std::size_t>(bins), 0.0);
  const double scale = hi > lo ? bins / (hi - lo) : 0.0;
  for (double x : v) {
    const double t = (x - lo) * scale;
    const int k = t <= 0.0 ? 0 : std::min(bins - 1, static_cast<int>(t));
    f[static_cast<std::size_t>(k)] += 1.0;
  }
  for (double& x : f) x /= static_cast<double>(v.size());
  return f;
}

// Gaussian KDE on `points` equispaced nodes of [g0, g0 + (points-1) dx].
std::vector<double> kde_on_grid(const std::vector<double>& v, double g0, double dx, int points,
                                double bandwidth) {
  std::vector<double> mass(static_cast<std::size_t>(points), 0.0);
  const double last = points - 1;
  for (double x : v) {
    const double t = std::clamp((x - g0) / dx, 0.0, last);
    const int i = std::min(static_cast<int>(t), points - 2);
    const double frac = t - i;
    mass[static_cast<std::size_t>(i)] += 1.0 - frac;
    mass[static_cast<std::size_t>(i) + 1] += frac;
  }
  const int reach = std::min(points - 1, static_cast<int>(std::ceil(5.0 * bandwidth / dx)));
  std::vector<double> kernel(static_cast<std::size_t>(reach) + 1);
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * bandwidth * static_cast<double>(v.size()));
  for (int k = 0; k <= reach; ++k) {
    const double u = k * dx / bandwidth;
    kernel[static_cast<std::size_t>(k)] = norm * std::exp(-0.5 * u * u);
  }
  std::vector<double> dens(static_cast<std::size_t>(points), 0.0);
  for (int j = 0; j < points; ++j) {
    const double m = mass[static_cast<std::size_t>(j)];
    if (m == 0.0) continue;
    const int lo = std::max(0, j - reach), hi = std::min(points - 1, j + reach);
    for (int l = lo; l <= hi; ++l) dens[static_cast<std::size_t>(l)] += m * kernel[static_cast<std::size_t>(std::abs(l - j))];
  }
  return dens;
}

double sample_sd(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(std::max<std::size_t>(v.size() - 1, 1)));
}

TvEstimate finish(double value, std::pair<double, double> ci, TvMethod method, double resolution,
                  const SamplePool& a, const SamplePool& b) {
  TvEstimate e;
  e.value = std::clamp(value, 0.0, 1.0);
  // Percentile intervals need not cover a biased point estimate; widen so they do.
  e.ci_low = std::clamp(std::min(ci.first, e.value), 0.0, 1.0);
  e.ci_high = std::clamp(std::max(ci.second, e.value), 0.0, 1.0);
  e.method = method;
  e.resolution = resolution;
  e.size_a = a.size();
  e.size_b = b.size();
  return e;
}

}  // namespace

double histogram_tv(const std::vector<double>& a, const std::vector<double>& b, double lo,
                    double hi, int bins) {
  const auto fa = bin_frequencies(a, lo, hi, bins), fb = bin_frequencies(b, lo, hi, bins);
  double s = 0.0;
  for (std::size_t k = 0; k < fa.size(); ++k) s += std::abs(fa[k] - fb[k]);
  return 0.5 * s;
}

double kde_tv(const std::vector<double>& a, const std::vector<double>& b, double lo, double hi,
              double bandwidth) {
  const double g0 = lo - 4.0 * bandwidth, g1 = hi + 4.0 * bandwidth;
  const double dx = (g1 - g0) / (kKdeGrid - 1);
  const auto ka = kde_on_grid(a, g0, dx, kKdeGrid, bandwidth);
  const auto kb = kde_on_grid(b, g0, dx, kKdeGrid, bandwidth);
  double s = 0.0;
  for (int j = 0; j < kKdeGrid; ++j) {
    const double d = std::abs(ka[static_cast<std::size_t>(j)] - kb[static_cast<std::size_t>(j)]);
    s += (j == 0 || j == kKdeGrid - 1) ? 0.5 * d : d;
  }
  return 0.5 * s * dx;
}

double auto_bandwidth(const std::vector<double>& values) {
  if (values.size() < 2) throw DomainError("bandwidth rule needs at least two values");
  const double iqr = empirical_quantile(values, 0.75) - empirical_quantile(values, 0.25);
  double spread = sample_sd(values);
  if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
  return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

std::pair<double, double> bootstrap_ci(const TvFunctional& estimator, const std::vector<double>& a,
                                       const std::vector<double>& b, int resamples,
                                       std::uint64_t seed, unsigned threads, bool paired) {
  if (resamples < 100) throw DomainError("bootstrap needs at least 100 resamples");
  if (a.empty() || b.empty()) throw DomainError("bootstrap needs nonempty samples");
  if (paired && a.size() != b.size()) throw DomainError("paired bootstrap needs equal sizes");
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  for_each_chunk(static_cast<std::size_t>(resamples), 1, threads,
                 [&](std::size_t r, std::size_t, std::size_t) {
                   auto eng = stream_engine(seed, r);
                   auto draw = [&eng](const std::vector<double>& src) {
                     std::uniform_int_distribution<std::size_t> pick(0, src.size() - 1);
                     std::vector<double> out(src.size());
                     for (double& x : out) x = src[pick(eng)];
                     return out;
                   };
                   if (paired) {
                     std::uniform_int_distribution<std::size_t> pick(0, a.size() - 1);
                     std::vector<double> ra(a.size()), rb(b.size());
                     for (std::size_t i = 0; i < a.size(); ++i) {
                       const std::size_t k = pick(eng);
                       ra[i] = a[k];
                       rb[i] = b[k];
                     }
                     stats[r] = estimator(ra, rb);
                     return;
                   }
                   const auto ra = draw(a);
                   const auto rb = draw(b);
                   stats[r] = estimator(ra, rb);
                 });
  return {empirical_quantile(stats, 0.025), empirical_quantile(stats, 0.975)};
}

TvEstimate tv_histogram(const SamplePool& a, const SamplePool& b, int bins, const TvOptions& opts) {
  require_nonempty(a, b);
  if (bins < 2) throw DomainError("histogram needs at least 2 bins");
  const auto [lo, hi] = pooled_range(a.values, b.values);
  const double value = histogram_tv(a.values, b.values, lo, hi, bins);
  std::pair<double, double> ci{value, value};
  if (opts.resamples > 0) {
    const TvFunctional est = [lo = lo, hi = hi, bins](const std::vector<double>& x, const std::vector<double>& y) {
      return histogram_tv(x, y, lo, hi, bins);
    };
    ci = bootstrap_ci(est, a.values, b.values, opts.resamples, opts.seed, opts.threads, opts.paired);
  }
  return finish(value, ci, TvMethod::Histogram, bins, a, b);
}

TvEstimate tv_kde(const SamplePool& a, const SamplePool& b, std::optional<double> bandwidth,
                  const TvOptions& opts) {
  require_nonempty(a, b);
  if (bandwidth && !(*bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
  const double h = bandwidth ? *bandwidth : 0.5 * (auto_bandwidth(a.values) + auto_bandwidth(b.values));
  if (!(h > 0.0)) throw DomainError("automatic bandwidth collapsed to zero");
  const auto [lo, hi] = pooled_range(a.values, b.values);
  const double value = kde_tv(a.values, b.values, lo, hi, h);
  std::pair<double, double> ci{value, value};
  if (opts.resamples > 0) {
    const TvFunctional est = [lo = lo, hi = hi, h](const std::vector<double>& x, const std::vector<double>& y) {
      return kde_tv(x, y, lo, hi, h);
    };
    ci = bootstrap_ci(est, a.values, b.values, opts.resamples, opts.seed, opts.threads, opts.paired);
  }
  return finish(value, ci, TvMethod::Kde, h, a, b);
}

KsResult ks_two_sample(const SamplePool& a, const SamplePool& b) {
  require_nonempty(a, b);
  std::vector<double> x = a.values, y = b.values;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  KsResult r;
  r.statistic = d;
  r.critical = 1.628 * std::sqrt((n + m) / (n * m));
  r.reject = d > r.critical;
  return r;
}

SamplePool standardize(const SamplePool& pool) {
  if (pool.empty()) throw DomainError("cannot standardize an empty pool");
  double ms = 0.0;
  for (double v : pool.values) ms += v * v;
  const double rms = std::sqrt(ms / static_cast<double>(pool.size()));
  if (!(rms > 0.0)) throw DomainError("cannot standardize a zero pool");
  SamplePool out = pool;
  for (double& v : out.values) v /= rms;
  out.meta += " standardized";
  return out;
}

}  // namespace tvlab
