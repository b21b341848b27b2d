#include "tvlab/fbm_paths.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

namespace tvlab {

double auto_cov(double h, int i, int j, int n) {
  if (n < 1 || i < 0 || j < 0 || i >= n || j >= n) throw DomainError("increment index out of range");
  const double k = std::abs(i - j), e = 2.0 * h;
  const double r = 0.5 * (std::pow(k + 1.0, e) + std::pow(std::abs(k - 1.0), e) - 2.0 * std::pow(k, e));
  return std::pow(static_cast<double>(n), -e) * r;
}

double fbm_normalization(double h) {
  return std::sqrt(h * (2.0 * h - 1.0) / c_alpha(h - 1.5));
}

double cross_cov(const HurstPair& hurst, int i, int j, int n) {
  if (hurst.h1() == hurst.h2()) return auto_cov(hurst.h1(), i, j, n);
  if (n < 1 || i < 0 || j < 0 || i >= n || j >= n) throw DomainError("increment index out of range");
  const auto phi = pairing_constants(hurst, true).s;
  const double c = fbm_normalization(hurst.h1()) * fbm_normalization(hurst.h2());
  const Interval bi{static_cast<double>(i) / n, static_cast<double>(i + 1) / n};
  const Interval bj{static_cast<double>(j) / n, static_cast<double>(j + 1) / n};
  return c * oriented_rect(bi, bj, phi);
}

IncrementCovariance build_joint_cov(const HurstPair& hurst, int n) {
  if (n < 1) throw DomainError("build_joint_cov needs n >= 1");
  IncrementCovariance cov{hurst, n, Eigen::MatrixXd(2 * n, 2 * n), {}, 0.0};
  auto& M = cov.matrix;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      M(i, j) = auto_cov(hurst.h1(), i, j, n);
      M(n + i, n + j) = auto_cov(hurst.h2(), i, j, n);
      M(i, n + j) = cross_cov(hurst, i, j, n);
      M(n + j, i) = M(i, n + j);
    }
  const double scale = M.trace() / (2.0 * n);
  for (double rel : {0.0, 1e-14, 1e-12}) {
    Eigen::MatrixXd shifted = M;
    shifted.diagonal().array() += rel * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      cov.cholesky = llt.matrixL();
      cov.jitter = rel * scale;
      return cov;
    }
  }
  throw NumericalError("increment covariance is not positive semidefinite");
}

double zn_kernel_scale(const HurstPair& hurst) {
  const auto phi = pairing_constants(hurst, true).s;
  // E[dB1_k dB2_k] = c1 c2 n^{-h1-h2} rho0 with rho0 the unit-square integral.
  return 1.0 / oriented_rect({0.0, 1.0}, {0.0, 1.0}, phi);
}

SamplePool sample_zn(const HurstPair& hurst, int n, std::size_t count, std::uint64_t seed,
                     const SamplingOptions& opts) {
  if (count < 1) throw DomainError("sample count must be positive");
  const IncrementCovariance cov = build_joint_cov(hurst, n);
  const double denom = cross_cov(hurst, 0, 0, n);
  const double norm = std::pow(static_cast<double>(n), 1.0 - hurst.h1() - hurst.h2());

  SamplePool pool;
  pool.seed = seed;
  pool.chunk = opts.chunk > 0 ? opts.chunk : kDefaultChunk;
  pool.first_stream = opts.first_stream;
  pool.stream_count = (count + pool.chunk - 1) / pool.chunk;
  pool.values.assign(count, 0.0);
  const Eigen::TriangularView<const Eigen::MatrixXd, Eigen::Lower> L(cov.cholesky);
  for_each_chunk(count, pool.chunk, opts.threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto eng = stream_engine(seed, opts.first_stream + c);
    std::normal_distribution<double> normal;
    const auto cols = static_cast<Eigen::Index>(end - begin);
    Eigen::MatrixXd Z(2 * n, cols);
    for (Eigen::Index col = 0; col < cols; ++col)
      for (Eigen::Index r = 0; r < 2 * n; ++r) Z(r, col) = normal(eng);
    const Eigen::MatrixXd X = L * Z;
    for (Eigen::Index col = 0; col < cols; ++col) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += X(k, col) * X(n + k, col) / denom - 1.0;
      pool.values[begin + static_cast<std::size_t>(col)] = norm * s;
    }
  });
  std::ostringstream os;
  os.precision(17);
  os << "zn n=" << n << " h1=" << hurst.h1() << " h2=" << hurst.h2() << " jitter=" << cov.jitter;
  pool.meta = os.str();
  return pool;
}

}  // namespace tvlab
