#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tvlab/sample_pool.hpp"

namespace tvlab {

enum class TvMethod { Histogram, Kde };

std::string to_string(TvMethod m);
TvMethod parse_tv_method(const std::string& s);

struct TvEstimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  TvMethod method = TvMethod::Histogram;
  double resolution = 0.0;  // bins or bandwidth
  std::size_t size_a = 0;
  std::size_t size_b = 0;
};

struct TvOptions {
  int resamples = 200;  // 0 skips the bootstrap (ci collapses to the value)
  std::uint64_t seed = 20240611;
  unsigned threads = 0;
  /// Resample (a_i, b_i) pairs jointly; for pools built from shared Gaussians.
  bool paired = false;
};

/// Half the L1 distance of bin frequencies on a common grid between the
/// pooled 0.01% and 99.99% quantiles; values outside land in the end bins.
TvEstimate tv_histogram(const SamplePool& a, const SamplePool& b, int bins = 200,
                        const TvOptions& opts = {});

/// Same functional on Gaussian kernel density estimates (2048-point grid,
/// linear binning). bandwidth unset = rule of thumb averaged over the pools.
TvEstimate tv_kde(const SamplePool& a, const SamplePool& b,
                  std::optional<double> bandwidth = std::nullopt, const TvOptions& opts = {});

using TvFunctional = std::function<double(const std::vector<double>&, const std::vector<double>&)>;

/// Percentile 2.5/97.5 interval of `estimator` over resamples with
/// replacement; resample r is drawn from stream r of `seed`.
std::pair<double, double> bootstrap_ci(const TvFunctional& estimator, const std::vector<double>& a,
                                       const std::vector<double>& b, int resamples,
                                       std::uint64_t seed, unsigned threads = 0,
                                       bool paired = false);

/// The fixed-grid estimators behind tv_histogram / tv_kde.
double histogram_tv(const std::vector<double>& a, const std::vector<double>& b, double lo,
                    double hi, int bins);
double kde_tv(const std::vector<double>& a, const std::vector<double>& b, double lo, double hi,
              double bandwidth);

double auto_bandwidth(const std::vector<double>& values);

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;  // 1% level
  bool reject = false;
};

KsResult ks_two_sample(const SamplePool& a, const SamplePool& b);

/// Divide by the root mean square so that E[X^2] = 1 empirically.
SamplePool standardize(const SamplePool& pool);

/// Linear-interpolated empirical quantile (p in [0, 1]).
double empirical_quantile(std::vector<double> values, double p);

}  // namespace tvlab
