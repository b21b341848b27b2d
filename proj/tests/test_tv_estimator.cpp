#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tvlab/errors.hpp"
#include "tvlab/tv_estimator.hpp"

using namespace tvlab;

namespace {

SamplePool gaussian(std::size_t m, double shift, std::uint64_t seed, double sd = 1.0) {
  SamplePool p;
  p.seed = seed;
  auto eng = stream_engine(seed, 0);
  std::normal_distribution<double> normal(shift, sd);
  for (std::size_t i = 0; i < m; ++i) p.values.push_back(normal(eng));
  p.stream_count = 1;
  return p;
}

// TV between N(0,1) and N(d,1): 2 Phi(d/2) - 1.
double gaussian_tv(double d) { return std::erf(d / (2.0 * std::numbers::sqrt2)); }

TvOptions quick(int resamples = 0) {
  TvOptions o;
  o.resamples = resamples;
  return o;
}

}  // namespace

TEST_CASE("identical and disjoint pools") {
  const auto a = gaussian(20000, 0.0, 1);
  const auto h = tv_histogram(a, a, 200, quick(100));
  CHECK(h.value == 0.0);
  CHECK(h.ci_low == 0.0);
  CHECK(h.ci_high >= 0.0);
  CHECK(tv_kde(a, a, std::nullopt, quick()).value < 1e-12);

  const auto b = gaussian(20000, 100.0, 2);
  CHECK(tv_histogram(a, b, 200, quick()).value == doctest::Approx(1.0));
  CHECK(tv_kde(a, b, std::nullopt, quick()).value == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("Gaussian location control") {
  const auto a = gaussian(1000000, 0.0, 11), b = gaussian(1000000, 0.5, 12);
  const double exact = gaussian_tv(0.5);
  CHECK(exact == doctest::Approx(0.1974).epsilon(1e-3));
  const auto h = tv_histogram(a, b, 200, quick(100));
  const auto k = tv_kde(a, b, std::nullopt, quick(100));
  CHECK(std::abs(h.value - exact) < 0.01);
  CHECK(std::abs(k.value - exact) < 0.01);
  CHECK(h.ci_low <= h.value);
  CHECK(h.value <= h.ci_high);
  // The two estimators agree within the union of their intervals.
  const double lo = std::min(h.ci_low, k.ci_low), hi = std::max(h.ci_high, k.ci_high);
  CHECK(h.value >= lo);
  CHECK(k.value <= hi);
  CHECK(std::abs(h.value - k.value) <= hi - lo);
}

TEST_CASE("estimates are symmetric in their arguments") {
  const auto a = gaussian(50000, 0.0, 3), b = gaussian(40000, 0.3, 4, 1.2);
  CHECK(tv_histogram(a, b, 100, quick()).value == tv_histogram(b, a, 100, quick()).value);
  CHECK(tv_kde(a, b, 0.1, quick()).value == tv_kde(b, a, 0.1, quick()).value);
}

TEST_CASE("estimates grow with separation") {
  const auto a = gaussian(200000, 0.0, 5);
  double prev = 0.0;
  for (double c : {0.1, 0.2, 0.4, 0.8, 1.6}) {
    const double v = tv_histogram(a, gaussian(200000, c, 6), 200, quick()).value;
    CHECK(v > prev);
    CHECK(std::abs(v - gaussian_tv(c)) < 0.02);
    prev = v;
  }
}

TEST_CASE("same-law floor is small") {
  const auto a = gaussian(1000000, 0.0, 7), b = gaussian(1000000, 0.0, 8);
  CHECK(tv_histogram(a, b, 200, quick()).value < 0.01);
  CHECK(tv_kde(a, b, std::nullopt, quick()).value < 0.01);
}

TEST_CASE("bootstrap interval width shrinks like m^{-1/2}") {
  auto width = [](std::size_t m) {
    const auto e = tv_histogram(gaussian(m, 0.0, 9), gaussian(m, 0.5, 10), 50, quick(200));
    return e.ci_high - e.ci_low;
  };
  const double ratio = width(10000) / width(40000);
  CHECK(ratio > 1.4);
  CHECK(ratio < 2.8);
}

TEST_CASE("bootstrap with 100 and 200 resamples overlap") {
  const auto a = gaussian(50000, 0.0, 13), b = gaussian(50000, 0.4, 14);
  const auto e1 = tv_histogram(a, b, 100, quick(100)), e2 = tv_histogram(a, b, 100, quick(200));
  CHECK(e1.value == e2.value);
  CHECK(std::max(e1.ci_low, e2.ci_low) <= std::min(e1.ci_high, e2.ci_high));
  CHECK_THROWS_AS(tv_histogram(a, b, 100, quick(50)), DomainError);
}

TEST_CASE("bootstrap does not depend on the thread count") {
  const auto a = gaussian(20000, 0.0, 15), b = gaussian(20000, 0.4, 16);
  TvOptions one = quick(100), four = quick(100);
  one.threads = 1;
  four.threads = 4;
  const auto e1 = tv_kde(a, b, std::nullopt, one), e4 = tv_kde(a, b, std::nullopt, four);
  CHECK(e1.ci_low == e4.ci_low);
  CHECK(e1.ci_high == e4.ci_high);
}

TEST_CASE("paired bootstrap needs matched sizes") {
  const auto a = gaussian(1000, 0.0, 17), b = gaussian(900, 0.0, 18);
  TvOptions o = quick(100);
  o.paired = true;
  CHECK_THROWS_AS(tv_histogram(a, b, 50, o), DomainError);
}

TEST_CASE("two-sample KS") {
  const auto a = gaussian(100000, 0.0, 19), b = gaussian(100000, 0.0, 20);
  const auto same = ks_two_sample(a, b);
  CHECK_FALSE(same.reject);
  CHECK(same.critical == doctest::Approx(1.628 * std::sqrt(2.0 / 100000.0)).epsilon(1e-3));
  const auto shifted = ks_two_sample(a, gaussian(100000, 0.05, 21));
  CHECK(shifted.reject);
  CHECK(shifted.statistic == doctest::Approx(gaussian_tv(0.05)).epsilon(0.3));
}

TEST_CASE("standardize and quantiles") {
  const auto s = standardize(gaussian(100000, 0.0, 22, 3.0));
  double ms = 0.0;
  for (double v : s.values) ms += v * v;
  CHECK(ms / s.size() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(empirical_quantile({3, 1, 2, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(empirical_quantile({3, 1, 2, 4}, 0.0) == 1.0);
  CHECK(empirical_quantile({3, 1, 2, 4}, 1.0) == 4.0);
  CHECK_THROWS_AS(standardize(SamplePool{}), DomainError);
}

TEST_CASE("method names round-trip") {
  CHECK(parse_tv_method(to_string(TvMethod::Kde)) == TvMethod::Kde);
  CHECK(parse_tv_method("histogram") == TvMethod::Histogram);
  CHECK_THROWS_AS(parse_tv_method("wasserstein"), DomainError);
}
