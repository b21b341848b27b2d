#include "tvlab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace tvlab {

std::size_t Grid::first_unit_panel() const {
  const auto it = std::lower_bound(edges.begin(), edges.end(), 0.0);
  return static_cast<std::size_t>(it - edges.begin());
}

Grid build_grid(const QuadratureConfig& cfg) {
  cfg.validate();
  if (!cfg.truncation_left)
    throw DomainError("build_grid needs a resolved truncation_left");
  const double left = *cfg.truncation_left;
  const auto unit = graded_breakpoints(0.0, 1.0, cfg.panels_per_unit, cfg.panel_grading,
                                       Cluster::Both);
  std::vector<double> tail{0.0};
  double x = 0.0, w = unit[1] - unit[0];
  while (x > left) {
    x -= w;
    w *= cfg.tail_growth;
    if (x - left < w) x = left;
    tail.push_back(x);
  }
  Grid g;
  g.edges.assign(tail.rbegin(), tail.rend());
  g.edges.insert(g.edges.end(), unit.begin() + 1, unit.end());
  for (std::size_t i = 0; i + 1 < g.edges.size(); ++i) {
    g.nodes.push_back(0.5 * (g.edges[i] + g.edges[i + 1]));
    g.weights.push_back(g.edges[i + 1] - g.edges[i]);
  }
  return g;
}

Grid build_grid(const HurstPair& h, const QuadratureConfig& cfg) {
  QuadratureConfig resolved = cfg;
  resolved.truncation_left = resolve_truncation_left(h, cfg);
  return build_grid(resolved);
}

namespace {

// s-quadrature on [0,1]: a graded sub-rule inside every grid panel, so the
// kinks of the cell profiles at panel edges sit on rule breakpoints.
QuadRule unit_rule(const Grid& grid, const QuadratureConfig& cfg) {
  constexpr int kSubPanels = 8;
  QuadRule rule;
  for (std::size_t i = grid.first_unit_panel(); i < grid.size(); ++i)
    rule.append(graded_rule(grid.edges[i], grid.edges[i + 1], kSubPanels, cfg.grading_exponent,
                            cfg.nodes_per_panel, Cluster::Both));
  return rule;
}

// A_ik = int_{X_i} (s_k - x)_+^a dx.
Eigen::MatrixXd cell_profiles(const Grid& grid, const QuadRule& rule, double a) {
  const auto N = static_cast<Eigen::Index>(grid.size());
  const auto S = static_cast<Eigen::Index>(rule.size());
  Eigen::MatrixXd A(N, S);
  for (Eigen::Index k = 0; k < S; ++k) {
    const double s = rule.x[k];
    for (Eigen::Index i = 0; i < N; ++i)
      A(i, k) = power_difference(s - grid.edges[i], s - grid.edges[i + 1], a + 1.0) / (a + 1.0);
  }
  return A;
}

// B_ib = int_{X_i} int_{I_b} (s - x)_+^a ds dx with I_b the n blocks of [0,1].
Eigen::MatrixXd block_profiles(const Grid& grid, int n, double a) {
  const auto N = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd B(N, n);
  const OrientedPower phi{1.0, 0.0, a};
  for (Eigen::Index i = 0; i < N; ++i)
    for (int b = 0; b < n; ++b)
      B(i, b) = oriented_rect({static_cast<double>(b) / n, static_cast<double>(b + 1) / n},
                              {grid.edges[i], grid.edges[i + 1]}, phi);
  return B;
}

}  // namespace

Eigen::MatrixXd cell_integrals(const KernelSpec& spec, const Grid& grid,
                               const QuadratureConfig& cfg) {
  const double a1 = spec.hurst.a1(), a2 = spec.hurst.a2();
  Eigen::MatrixXd C;
  if (spec.kind == KernelKind::FInfinity) {
    const QuadRule rule = unit_rule(grid, cfg);
    const Eigen::Map<const Eigen::VectorXd> w(rule.w.data(), static_cast<Eigen::Index>(rule.size()));
    const Eigen::MatrixXd A = cell_profiles(grid, rule, a1);
    const Eigen::MatrixXd B = a2 == a1 ? A : cell_profiles(grid, rule, a2);
    C = A * w.asDiagonal() * B.transpose();
  } else {
    const Eigen::MatrixXd A = block_profiles(grid, spec.n, a1);
    const Eigen::MatrixXd B = a2 == a1 ? A : block_profiles(grid, spec.n, a2);
    C = static_cast<double>(spec.n) * (A * B.transpose());
  }
  return spec.factor * C;
}

Eigen::MatrixXd assemble_galerkin(const Eigen::MatrixXd& cells, const Grid& grid) {
  const auto N = static_cast<Eigen::Index>(grid.size());
  if (cells.rows() != N || cells.cols() != N)
    throw DomainError("cell matrix does not match the grid");
  Eigen::MatrixXd M(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = i; j < N; ++j) {
      const double v = 0.5 * (cells(i, j) + cells(j, i)) / std::sqrt(grid.weights[i] * grid.weights[j]);
      M(i, j) = v;
      M(j, i) = v;
    }
  return M;
}

Eigen::MatrixXd discretize_operator(const KernelSpec& spec, const Grid& grid,
                                    const QuadratureConfig& cfg) {
  return assemble_galerkin(cell_integrals(spec, grid, cfg), grid);
}

SpectralDecomposition SpectralDecomposition::from_eigenvalues(std::vector<double> eigenvalues) {
  std::stable_sort(eigenvalues.begin(), eigenvalues.end(),
                   [](double a, double b) { return std::abs(a) > std::abs(b); });
  SpectralDecomposition d;
  d.eigenvalues = std::move(eigenvalues);
  for (double lam : d.eigenvalues) d.hs_norm_sq += lam * lam;
  return d;
}

double SpectralDecomposition::residual_hs_sq(double analytic_norm_sq) const {
  return std::max(analytic_norm_sq - hs_norm_sq, 0.0);
}

namespace {

std::vector<Eigen::Index> magnitude_order(const Eigen::VectorXd& values) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(values[a]) > std::abs(values[b]);
  });
  return idx;
}

}  // namespace

SpectralDecomposition eigendecompose(const Eigen::MatrixXd& m, const KernelSpec& source,
                                     const Grid* grid) {
  if (m.rows() != m.cols()) throw DomainError("eigendecompose needs a square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  const auto order = magnitude_order(solver.eigenvalues());
  const auto N = m.rows();

  SpectralDecomposition d;
  d.source = source;
  d.weights = grid ? grid->weights : std::vector<double>(static_cast<std::size_t>(N), 1.0);
  if (static_cast<Eigen::Index>(d.weights.size()) != N)
    throw DomainError("grid does not match the matrix");
  d.eigenvectors.resize(N, N);
  for (Eigen::Index k = 0; k < N; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    const double lam = solver.eigenvalues()[src];
    d.eigenvalues.push_back(lam);
    d.hs_norm_sq += lam * lam;
    for (Eigen::Index i = 0; i < N; ++i)
      d.eigenvectors(i, k) = solver.eigenvectors()(i, src) / std::sqrt(d.weights[i]);
  }
  return d;
}

SpectralDecomposition exact_finite_rank_spectrum(const KernelSpec& spec) {
  if (spec.kind != KernelKind::FN) throw DomainError("exact spectrum needs an f_n kernel");
  const int n = spec.n;
  const auto raw = pairing_constants(spec.hurst, false);
  const auto mixed = pairing_constants(spec.hurst, true).s;

  // Gram matrix of phi_i = int_{I_i} (s - .)_+^{a1} ds and psi_i likewise with a2.
  Eigen::MatrixXd G(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    const Interval bi{static_cast<double>(i) / n, static_cast<double>(i + 1) / n};
    for (int j = 0; j < n; ++j) {
      const Interval bj{static_cast<double>(j) / n, static_cast<double>(j + 1) / n};
      G(i, j) = oriented_rect(bi, bj, raw.s);
      G(n + i, n + j) = oriented_rect(bi, bj, raw.t);
      G(i, n + j) = oriented_rect(bi, bj, mixed);
      G(n + j, i) = G(i, n + j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(G);
  if (gram.info() != Eigen::Success) throw NumericalError("Gram eigensolver did not converge");
  const Eigen::VectorXd root = gram.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd R = gram.eigenvectors() * root.asDiagonal();

  // sym f_n = (n/2) sum_i (phi_i x psi_i + psi_i x phi_i).
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    C(i, n + i) = 0.5 * n * spec.factor;
    C(n + i, i) = 0.5 * n * spec.factor;
  }
  const Eigen::MatrixXd reduced = R.transpose() * C * R;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (reduced + reduced.transpose()),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");

  SpectralDecomposition d;
  d.source = spec;
  for (auto k : magnitude_order(solver.eigenvalues())) {
    const double lam = solver.eigenvalues()[k];
    d.eigenvalues.push_back(lam);
    d.hs_norm_sq += lam * lam;
  }
  return d;
}

SpectralDecomposition galerkin_spectrum(const KernelSpec& spec, const QuadratureConfig& cfg) {
  const Grid grid = build_grid(spec.hurst, cfg);
  return eigendecompose(discretize_operator(spec, grid, cfg), spec, &grid);
}

SpectralDecomposition spectrum_for(const KernelSpec& spec, const QuadratureConfig& cfg) {
  return spec.kind == KernelKind::FN ? exact_finite_rank_spectrum(spec) : galerkin_spectrum(spec, cfg);
}

HypothesisH verify_hypothesis_H(const SpectralDecomposition& d, double threshold) {
  HypothesisH out;
  out.threshold = threshold > 0.0 ? threshold : 1e-6 * d.max_abs();
  for (double lam : d.eigenvalues)
    if (std::abs(lam) > out.threshold) ++out.count;
  out.satisfied = out.count >= 5;
  return out;
}

}  // namespace tvlab
