#include "tvlab/chaos_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tvlab {

RetainedSpectrum retained_spectrum(const SpectralDecomposition& d, double floor_ratio) {
  RetainedSpectrum r;
  const double floor = floor_ratio * d.max_abs();
  for (double lam : d.eigenvalues) {
    if (std::abs(lam) > floor)
      r.lambda.push_back(lam);
    else
      r.discarded_hs_sq += lam * lam;
  }
  if (r.lambda.empty()) throw DomainError("spectrum has no nonzero eigenvalue");
  return r;
}

namespace {

std::string describe(const SpectralDecomposition& d, const RetainedSpectrum& r,
                     const SamplingOptions& opts, const char* what) {
  std::ostringstream os;
  os.precision(17);
  os << what << " source=" << (d.source ? d.source->describe() : std::string("synthetic"))
     << " retained=" << r.lambda.size() << " discarded_hs_sq=" << r.discarded_hs_sq
     << " tail_hs_sq=" << opts.tail_hs_sq;
  return os.str();
}

// Fills pool.values with transform(lambda-weighted Gaussian sums), chunk c
// drawn from stream first_stream + c.
template <class Draw>
SamplePool run_sampler(std::size_t count, std::uint64_t seed, const SamplingOptions& opts, Draw draw) {
  if (count < 1) throw DomainError("sample count must be positive");
  SamplePool pool;
  pool.seed = seed;
  pool.chunk = opts.chunk > 0 ? opts.chunk : kDefaultChunk;
  pool.first_stream = opts.first_stream;
  pool.stream_count = (count + pool.chunk - 1) / pool.chunk;
  pool.values.assign(count, 0.0);
  for_each_chunk(count, pool.chunk, opts.threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto eng = stream_engine(seed, opts.first_stream + c);
    std::normal_distribution<double> normal;
    for (std::size_t i = begin; i < end; ++i) pool.values[i] = draw(eng, normal);
  });
  return pool;
}

}  // namespace

SamplePool sample_second_chaos(const SpectralDecomposition& d, std::size_t count,
                               std::uint64_t seed, const SamplingOptions& opts) {
  const RetainedSpectrum r = retained_spectrum(d, opts.floor_ratio);
  const double tail_sd = opts.tail_hs_sq > 0.0 ? std::sqrt(2.0 * opts.tail_hs_sq) : 0.0;
  auto pool = run_sampler(count, seed, opts, [&](std::mt19937_64& eng, std::normal_distribution<double>& normal) {
    double v = 0.0;
    for (double lam : r.lambda) {
      const double z = normal(eng);
      v += lam * (z * z - 1.0);
    }
    if (tail_sd > 0.0) v += tail_sd * normal(eng);
    return v;
  });
  pool.meta = describe(d, r, opts, "second_chaos");
  return pool;
}

SamplePool sample_malliavin_norm_sq(const SpectralDecomposition& d, std::size_t count,
                                    std::uint64_t seed, const SamplingOptions& opts) {
  const RetainedSpectrum r = retained_spectrum(d, opts.floor_ratio);
  std::vector<double> lam2;
  for (double lam : r.lambda) lam2.push_back(4.0 * lam * lam);
  const double shift = opts.tail_hs_sq > 0.0 ? 4.0 * opts.tail_hs_sq : 0.0;
  auto pool = run_sampler(count, seed, opts, [&](std::mt19937_64& eng, std::normal_distribution<double>& normal) {
    double v = 0.0;
    for (double l : lam2) {
      const double z = normal(eng);
      v += l * z * z;
    }
    return v + shift;
  });
  pool.meta = describe(d, r, opts, "malliavin_norm_sq");
  return pool;
}

namespace {

double quantile_of_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (pos - i) * (sorted[i + 1] - sorted[i]);
}

}  // namespace

RateFit small_ball_fit(const SamplePool& pool, const std::vector<double>& u_grid) {
  if (pool.empty()) throw DomainError("empty pool");
  std::vector<double> sorted = pool.values;
  std::sort(sorted.begin(), sorted.end());
  const double median = quantile_of_sorted(sorted, 0.5);

  std::vector<double> us;
  for (double u : u_grid) {
    if (!(u > 0.0)) throw DomainError("small-ball levels must be positive");
    if (u < median) us.push_back(u);
  }
  std::sort(us.begin(), us.end());
  if (us.size() < 3 || us.back() < 10.0 * us.front() * (1.0 - 1e-12))
    throw DomainError("small-ball grid must span a decade below the median");

  std::vector<std::pair<double, double>> pts;
  const double m = static_cast<double>(sorted.size());
  for (double u : us) {
    const auto hits = std::upper_bound(sorted.begin(), sorted.end(), u) - sorted.begin();
    if (hits < 50) {
      if (u == us.front())
        throw InsufficientTailHits("fewer than 50 draws below the smallest small-ball level");
      continue;
    }
    pts.emplace_back(u, static_cast<double>(hits) / m);
  }
  return fit_loglog(std::move(pts));
}

RateFit small_ball_exponent(const SpectralDecomposition& d, const std::vector<double>& u_grid,
                            std::size_t count, std::uint64_t seed, const SamplingOptions& opts) {
  return small_ball_fit(sample_malliavin_norm_sq(d, count, seed, opts), u_grid);
}

std::vector<double> auto_small_ball_grid(const SamplePool& pool, int points) {
  if (pool.size() < 100) throw DomainError("pool too small for an automatic small-ball grid");
  if (points < 3) throw DomainError("need at least 3 grid points");
  std::vector<double> sorted = pool.values;
  std::sort(sorted.begin(), sorted.end());
  const double median = quantile_of_sorted(sorted, 0.5);
  const double q = quantile_of_sorted(sorted, 60.0 / static_cast<double>(sorted.size()));
  const double lo = std::max(q, median / 100.0);
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) grid.push_back(lo * std::pow(10.0, static_cast<double>(i) / (points - 1)));
  return grid;
}

}  // namespace tvlab
