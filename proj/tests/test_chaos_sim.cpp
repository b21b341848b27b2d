#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>

#include "tvlab/chaos_sim.hpp"
#include "tvlab/tv_estimator.hpp"

using namespace tvlab;

namespace {

struct Moments {
  double mean, var, m3, se_mean, se_var, se_m3;
};

Moments moments(const std::vector<double>& x) {
  const double m = static_cast<double>(x.size());
  double mu = 0.0;
  for (double v : x) mu += v;
  mu /= m;
  double s2 = 0, s3 = 0, s4 = 0, s6 = 0;
  for (double v : x) {
    const double d = v - mu, d2 = d * d;
    s2 += d2;
    s3 += d2 * d;
    s4 += d2 * d2;
    s6 += d2 * d2 * d2;
  }
  s2 /= m;
  s3 /= m;
  s4 /= m;
  s6 /= m;
  return {mu, s2, s3, std::sqrt(s2 / m), std::sqrt((s4 - s2 * s2) / m), std::sqrt((s6 - s3 * s3) / m)};
}

double power_sum(const std::vector<double>& lam, int p) {
  double s = 0.0;
  for (double l : lam) s += std::pow(l, p);
  return s;
}

const SpectralDecomposition& finf_spectrum() {
  static const SpectralDecomposition d = galerkin_spectrum(KernelSpec::f_infinity(HurstPair(0.8, 0.8)));
  return d;
}

// log-log slope of the exact CDF on the grid, for comparison with sampled fits
double exact_slope(const std::vector<double>& u, auto cdf) {
  std::vector<std::pair<double, double>> pts;
  for (double x : u) pts.emplace_back(x, cdf(x));
  return fit_loglog(pts).slope;
}

}  // namespace

TEST_CASE("single eigenvalue: centred chi-square") {
  const auto d = SpectralDecomposition::from_eigenvalues({1.0});
  const auto pool = sample_second_chaos(d, 400000, 11);
  const auto m = moments(pool.values);
  CHECK(std::abs(m.mean) < 3 * m.se_mean);
  CHECK(std::abs(m.var - 2.0) < 3 * m.se_var);
  CHECK(*std::min_element(pool.values.begin(), pool.values.end()) >= -1.0);
}

TEST_CASE("isometry and third cumulant for the f_inf spectrum") {
  const auto& d = finf_spectrum();
  const auto pool = sample_second_chaos(d, 1000000, 5);
  const auto m = moments(pool.values);
  const auto lam = retained_spectrum(d, SamplingOptions{}.floor_ratio).lambda;
  const double s2 = power_sum(lam, 2), s3 = power_sum(lam, 3), s4 = power_sum(lam, 4);
  // Standard error of the sample variance from the chaos cumulants.
  const double se_var = std::sqrt((48.0 * s4 + 2.0 * 4.0 * s2 * s2) / 1e6);
  CHECK(std::abs(m.var - 2.0 * s2) < 3 * se_var);
  CHECK(std::abs(m.mean) < 3 * m.se_mean);
  CHECK(std::abs(m.m3 - 8.0 * s3) < 5 * m.se_m3);
}

TEST_CASE("Gaussian tail completion adds its variance") {
  const auto d = SpectralDecomposition::from_eigenvalues({2.0, 1.0, 0.5});
  SamplingOptions opts;
  opts.tail_hs_sq = 1.5;
  const auto pool = sample_second_chaos(d, 400000, 3, opts);
  const auto m = moments(pool.values);
  CHECK(std::abs(m.var - 2.0 * (5.25 + 1.5)) < 3 * m.se_var);
  const auto dn = sample_malliavin_norm_sq(d, 1000, 3, opts);
  const auto base = sample_malliavin_norm_sq(d, 1000, 3);
  for (std::size_t i = 0; i < dn.size(); ++i) CHECK(dn.values[i] == doctest::Approx(base.values[i] + 6.0));
}

TEST_CASE("Malliavin norm moments and positivity") {
  const auto d = SpectralDecomposition::from_eigenvalues({1.0, -0.6, 0.3, 0.1});
  const auto pool = sample_malliavin_norm_sq(d, 400000, 9);
  const double s2 = 1.0 + 0.36 + 0.09 + 0.01, s4 = 1.0 + 0.1296 + 0.0081 + 0.0001;
  const auto m = moments(pool.values);
  CHECK(std::abs(m.mean - 4.0 * s2) < 3 * m.se_mean);
  CHECK(std::abs(m.var - 32.0 * s4) < 3 * m.se_var);
  CHECK(*std::min_element(pool.values.begin(), pool.values.end()) > 0.0);
}

TEST_CASE("scaling the spectrum scales matched draws exactly") {
  const auto& d = finf_spectrum();
  auto scaled = d;
  for (auto& l : scaled.eigenvalues) l *= 1.25;
  const auto a = sample_second_chaos(d, 5000, 21), b = sample_second_chaos(scaled, 5000, 21);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b.values[i] == doctest::Approx(1.25 * a.values[i]).epsilon(1e-12));
}

TEST_CASE("flipping every eigenvalue negates every draw") {
  const auto d = SpectralDecomposition::from_eigenvalues({1.0, 0.7, -0.2, 0.05});
  const auto f = SpectralDecomposition::from_eigenvalues({-1.0, -0.7, 0.2, -0.05});
  const auto a = sample_second_chaos(d, 10000, 2), b = sample_second_chaos(f, 10000, 2);
  bool all = true;
  for (std::size_t i = 0; i < a.size(); ++i) all = all && b.values[i] == -a.values[i];
  CHECK(all);
}

TEST_CASE("draws do not depend on the thread count") {
  const auto& d = finf_spectrum();
  SamplingOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = sample_second_chaos(d, 50000, 77, one), b = sample_second_chaos(d, 50000, 77, four);
  CHECK(a.values == b.values);
  const auto c = sample_malliavin_norm_sq(d, 50000, 77, one), e = sample_malliavin_norm_sq(d, 50000, 77, four);
  CHECK(c.values == e.values);
  CHECK(sample_second_chaos(d, 100, 78, one).values != a.values);
}

TEST_CASE("merging adjacent stream ranges") {
  const auto d = SpectralDecomposition::from_eigenvalues({1.0, 0.5});
  SamplingOptions o;
  o.chunk = 100;
  auto part = [&](std::uint64_t first, std::size_t count) {
    SamplingOptions p = o;
    p.first_stream = first;
    return sample_second_chaos(d, count, 4, p);
  };
  const auto whole = part(0, 550);
  const auto a = part(0, 200), b = part(2, 300), c = part(5, 50);
  const auto left = merge(merge(a, b), c), right = merge(a, merge(c, b));
  CHECK(left.values == whole.values);
  CHECK(right.values == whole.values);
  CHECK(merge(b, a).values == merge(a, b).values);
  CHECK(left.stream_count == whole.stream_count);
  CHECK_THROWS_AS(merge(a, c), DomainError);
  CHECK_THROWS_AS(merge(c, part(6, 100)), DomainError);  // partial chunk in front
}

TEST_CASE("truncating the spectrum further changes little") {
  const auto& d = finf_spectrum();
  auto head = [&](std::size_t k) {
    return SpectralDecomposition::from_eigenvalues({d.eigenvalues.begin(), d.eigenvalues.begin() + k});
  };
  const auto a = sample_second_chaos(head(40), 100000, 8), b = sample_second_chaos(head(50), 100000, 9);
  CHECK_FALSE(ks_two_sample(a, b).reject);
  const double diff = power_sum({d.eigenvalues.begin() + 40, d.eigenvalues.begin() + 50}, 2);
  CHECK(diff < 0.01 * head(40).hs_norm_sq);
}

TEST_CASE("small-ball slope of five equal eigenvalues") {
  const auto d = SpectralDecomposition::from_eigenvalues({1.0, 1.0, 1.0, 1.0, 1.0});
  const auto pool = sample_malliavin_norm_sq(d, 2000000, 31);
  const auto grid = auto_small_ball_grid(pool);
  const auto fit = small_ball_fit(pool, grid);
  CHECK(fit.slope == doctest::Approx(2.5).epsilon(0.12));
  // ||DF||^2 = 4 chi^2_5, so the exact CDF is P(5/2, u/8).
  const double ref = exact_slope(grid, [](double u) { return boost::math::gamma_p(2.5, u / 8.0); });
  CHECK(compare_exponent(fit, ref, 0.02));
}

TEST_CASE("small-ball slope of a single eigenvalue") {
  const auto d = SpectralDecomposition::from_eigenvalues({1.0});
  const auto pool = sample_malliavin_norm_sq(d, 1000000, 32);
  const auto grid = auto_small_ball_grid(pool);
  const auto fit = small_ball_fit(pool, grid);
  const double ref = exact_slope(grid, [](double u) { return std::erf(std::sqrt(u / 8.0)); });
  CHECK(compare_exponent(fit, ref, 0.02));
  CHECK(fit.slope == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("small-ball grid preconditions") {
  const auto d = SpectralDecomposition::from_eigenvalues({1.0, 1.0, 1.0});
  const auto pool = sample_malliavin_norm_sq(d, 20000, 1);
  std::vector<double> sorted = pool.values;
  std::sort(sorted.begin(), sorted.end());
  const double med = sorted[sorted.size() / 2];

  // A grid starting so low that almost nothing is below it.
  CHECK_THROWS_AS(small_ball_fit(pool, {1e-9, 1e-8, 1e-7, 1e-6}), InsufficientTailHits);
  // Points above the median are ignored.
  const std::vector<double> base{med / 40, med / 20, med / 10, med / 4};
  auto extended = base;
  extended.push_back(2 * med);
  extended.push_back(5 * med);
  CHECK(small_ball_fit(pool, extended).slope == small_ball_fit(pool, base).slope);
  // Less than a decade left after dropping.
  CHECK_THROWS_AS(small_ball_fit(pool, {med / 4, med / 3, med / 2, 2 * med}), DomainError);
}
