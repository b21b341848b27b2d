#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "tvlab/chaos_sim.hpp"
#include "tvlab/kernels.hpp"

namespace tvlab {

/// Unit-variance fBm increment covariance on the grid k/n.
double auto_cov(double h, int i, int j, int n);

/// E[dB1_i dB2_j] for the pair driven by one Brownian motion.
double cross_cov(const HurstPair& hurst, int i, int j, int n);

/// c(H) with E[(B^H_1)^2] = 1.
double fbm_normalization(double h);

struct IncrementCovariance {
  HurstPair hurst;
  int n = 0;
  Eigen::MatrixXd matrix;  // (dB1_0..dB1_{n-1}, dB2_0..dB2_{n-1})
  Eigen::MatrixXd cholesky;
  double jitter = 0.0;  // absolute diagonal shift that made the Cholesky succeed
};

IncrementCovariance build_joint_cov(const HurstPair& hurst, int n);

/// Z_n = n^{1-h1-h2} sum_k (dB1_k dB2_k / E[dB1_k dB2_k] - 1).
SamplePool sample_zn(const HurstPair& hurst, int n, std::size_t count, std::uint64_t seed,
                     const SamplingOptions& opts = {});

/// b with Z_n = b * I_2(f_n) in the normalization above (and Z_inf = b * I_2(f_inf)).
double zn_kernel_scale(const HurstPair& hurst);

}  // namespace tvlab
