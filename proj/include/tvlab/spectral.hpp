#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "tvlab/kernels.hpp"

namespace tvlab {

/// Panel decomposition of [left, 1]: graded panels on [0,1], geometric
/// panels growing away from 0 on [left, 0].
struct Grid {
  std::vector<double> edges;
  std::vector<double> nodes;    // panel midpoints
  std::vector<double> weights;  // panel widths

  std::size_t size() const { return weights.size(); }
  double left() const { return edges.front(); }
  /// Index of the first panel inside [0, 1].
  std::size_t first_unit_panel() const;
};

Grid build_grid(const QuadratureConfig& cfg);
Grid build_grid(const HurstPair& h, const QuadratureConfig& cfg);

/// Raw cell integrals C_ij = int_{X_i} int_{X_j} f(x, y) dy dx (unsymmetrized).
Eigen::MatrixXd cell_integrals(const KernelSpec& spec, const Grid& grid,
                               const QuadratureConfig& cfg = {});

/// M_ij = (C_ij + C_ji) / (2 sqrt(w_i w_j)).
Eigen::MatrixXd assemble_galerkin(const Eigen::MatrixXd& cells, const Grid& grid);

/// Symmetrized Galerkin matrix of `spec` on `grid`.
Eigen::MatrixXd discretize_operator(const KernelSpec& spec, const Grid& grid,
                                    const QuadratureConfig& cfg = {});

struct SpectralDecomposition {
  std::vector<double> eigenvalues;  // sorted by |lambda|, descending
  /// Column k holds the nodal values of eigenfunction k, normalized so that
  /// sum_i w_i v_ik v_il = delta_kl. Empty for spectra computed without a grid.
  Eigen::MatrixXd eigenvectors;
  std::vector<double> weights;
  double hs_norm_sq = 0.0;
  std::optional<KernelSpec> source;  // unset for synthetic spectra

  /// Spectrum given directly by its eigenvalues (no eigenfunctions).
  static SpectralDecomposition from_eigenvalues(std::vector<double> eigenvalues);

  double max_abs() const { return eigenvalues.empty() ? 0.0 : std::abs(eigenvalues.front()); }
  /// ||f||^2 - sum lambda_k^2 for a known analytic norm (clamped at 0).
  double residual_hs_sq(double analytic_norm_sq) const;
};

/// Dense symmetric eigensolve; weights default to 1 when the grid is omitted.
SpectralDecomposition eigendecompose(const Eigen::MatrixXd& m, const KernelSpec& source,
                                     const Grid* grid = nullptr);

/// Exact spectrum of sym f_n through the Gram matrix of its 2n block
/// functions; no grid, no truncation.
SpectralDecomposition exact_finite_rank_spectrum(const KernelSpec& spec);

/// Galerkin spectrum of sym f for the default or configured grid.
SpectralDecomposition galerkin_spectrum(const KernelSpec& spec, const QuadratureConfig& cfg = {});

/// Spectrum appropriate for sampling: exact for f_n, Galerkin for f_inf.
SpectralDecomposition spectrum_for(const KernelSpec& spec, const QuadratureConfig& cfg = {});

struct HypothesisH {
  int count = 0;
  bool satisfied = false;
  double threshold = 0.0;
};

/// threshold <= 0 selects the default 1e-6 * max|lambda|.
HypothesisH verify_hypothesis_H(const SpectralDecomposition& d, double threshold = 0.0);

}  // namespace tvlab
