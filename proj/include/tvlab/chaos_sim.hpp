#pragma once

#include <cstdint>
#include <vector>

#include "tvlab/ratefit.hpp"
#include "tvlab/sample_pool.hpp"
#include "tvlab/spectral.hpp"

namespace tvlab {

struct SamplingOptions {
  unsigned threads = 0;  // 0 = hardware concurrency; never changes the values
  std::size_t chunk = kDefaultChunk;
  std::uint64_t first_stream = 0;
  double floor_ratio = 1e-6;  // eigenvalues with |lambda| <= floor_ratio * max are dropped
  /// Squared HS norm missing from the spectrum (analytic ||f||^2 minus the
  /// retained sum of squares). When positive, I_2 draws get an independent
  /// N(0, 2 * tail_hs_sq) term and ||DF||^2 draws the constant 4 * tail_hs_sq.
  double tail_hs_sq = 0.0;
};

struct RetainedSpectrum {
  std::vector<double> lambda;
  double discarded_hs_sq = 0.0;
};

RetainedSpectrum retained_spectrum(const SpectralDecomposition& d, double floor_ratio);

/// Draws of sum_k lambda_k (Z_k^2 - 1).
SamplePool sample_second_chaos(const SpectralDecomposition& d, std::size_t count,
                               std::uint64_t seed, const SamplingOptions& opts = {});

/// Draws of 4 sum_k lambda_k^2 Z_k^2.
SamplePool sample_malliavin_norm_sq(const SpectralDecomposition& d, std::size_t count,
                                    std::uint64_t seed, const SamplingOptions& opts = {});

/// Log-log slope of u -> P(||DF||^2 <= u). Grid points at or above the
/// sample median are dropped; the rest must span a decade and the smallest
/// needs >= 50 hits.
RateFit small_ball_exponent(const SpectralDecomposition& d, const std::vector<double>& u_grid,
                            std::size_t count, std::uint64_t seed,
                            const SamplingOptions& opts = {});

/// Same fit on an existing pool of ||DF||^2 draws.
RateFit small_ball_fit(const SamplePool& pool, const std::vector<double>& u_grid);

/// Decade of `points` log-spaced levels starting at
/// max(empirical quantile(60 / size), median / 100).
std::vector<double> auto_small_ball_grid(const SamplePool& pool, int points = 8);

}  // namespace tvlab
