#include <doctest.h>

#include <cmath>
#include <numeric>

#include "tvlab/spectral.hpp"

using namespace tvlab;

namespace {

QuadratureConfig with_ppu(int ppu) {
  QuadratureConfig c;
  c.panels_per_unit = ppu;
  return c;
}

}  // namespace

TEST_CASE("grid layout") {
  QuadratureConfig c;
  c.panels_per_unit = 1;
  c.truncation_left = -1.0;
  c.panel_grading = 1.0;
  const Grid g = build_grid(c);
  CHECK(g.edges == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(g.weights == std::vector<double>{1.0, 1.0});
  CHECK(g.nodes == std::vector<double>{-0.5, 0.5});
  CHECK(g.first_unit_panel() == 1);

  c.panels_per_unit = 16;
  c.truncation_left = -1000.0;
  c.panel_grading = 1.5;
  const Grid h = build_grid(c);
  CHECK(h.left() == -1000.0);
  CHECK(h.edges.back() == 1.0);
  CHECK(std::accumulate(h.weights.begin(), h.weights.end(), 0.0) == doctest::Approx(1001.0));
  CHECK(h.size() - h.first_unit_panel() == 16);
  for (std::size_t i = 1; i < h.edges.size(); ++i) CHECK(h.edges[i] > h.edges[i - 1]);
  // Panels grow away from 0 on the left.
  for (std::size_t i = 1; i + 1 < h.first_unit_panel(); ++i) CHECK(h.weights[i - 1] >= h.weights[i]);

  QuadratureConfig unresolved;
  CHECK_THROWS_AS(build_grid(unresolved), DomainError);
  CHECK(build_grid(HurstPair(0.8, 0.8), unresolved).left() < -1e10);
}

TEST_CASE("eigendecompose on small symmetric matrices") {
  const auto src = KernelSpec::f_infinity(HurstPair(0.8, 0.8));
  Eigen::MatrixXd rank1 = Eigen::VectorXd::LinSpaced(5, 1, 5) * Eigen::VectorXd::LinSpaced(5, 1, 5).transpose();
  const auto d1 = eigendecompose(rank1, src);
  CHECK(d1.eigenvalues[0] == doctest::Approx(55.0));
  CHECK(verify_hypothesis_H(d1).count == 1);
  CHECK_FALSE(verify_hypothesis_H(d1).satisfied);

  Eigen::MatrixXd diag = Eigen::Vector3d(3, -1, 2).asDiagonal();
  const auto d2 = eigendecompose(diag, src);
  CHECK(d2.eigenvalues == std::vector<double>{3.0, 2.0, -1.0});
  CHECK(d2.hs_norm_sq == doctest::Approx(14.0));
  CHECK(d2.max_abs() == 3.0);
  CHECK(d2.residual_hs_sq(20.0) == doctest::Approx(6.0));
  CHECK(d2.residual_hs_sq(10.0) == 0.0);
  CHECK_THROWS_AS(eigendecompose(Eigen::MatrixXd(2, 3), src), DomainError);
}

TEST_CASE("Galerkin matrix: Frobenius norm, scaling, eigenvectors") {
  const HurstPair hp(0.9, 0.7);
  QuadratureConfig c = with_ppu(16);
  const Grid g = build_grid(hp, c);
  const auto spec = KernelSpec::f_infinity(hp);
  const Eigen::MatrixXd M = discretize_operator(spec, g, c);
  CHECK((M - M.transpose()).norm() == 0.0);
  const auto d = eigendecompose(M, spec, &g);
  CHECK(d.hs_norm_sq == doctest::Approx(M.squaredNorm()).epsilon(1e-10));
  for (std::size_t k = 1; k < d.eigenvalues.size(); ++k)
    CHECK(std::abs(d.eigenvalues[k]) <= std::abs(d.eigenvalues[k - 1]));

  const Eigen::MatrixXd M2 = discretize_operator(KernelSpec::scaled(spec, 2.0), g, c);
  const auto d2 = eigendecompose(M2, spec, &g);
  for (std::size_t k = 0; k < 10; ++k) CHECK(d2.eigenvalues[k] == doctest::Approx(2.0 * d.eigenvalues[k]).epsilon(1e-10));

  // Weighted orthonormality of nodal eigenfunctions.
  const Eigen::Map<const Eigen::VectorXd> w(d.weights.data(), static_cast<Eigen::Index>(d.weights.size()));
  const Eigen::MatrixXd gram = d.eigenvectors.transpose() * w.asDiagonal() * d.eigenvectors;
  CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-8);

  // Reconstruction: M = W^{1/2} V diag(lambda) V^T W^{1/2}.
  const Eigen::VectorXd sw = w.cwiseSqrt();
  Eigen::VectorXd lam(static_cast<Eigen::Index>(d.eigenvalues.size()));
  for (Eigen::Index k = 0; k < lam.size(); ++k) lam[k] = d.eigenvalues[static_cast<std::size_t>(k)];
  const Eigen::MatrixXd U = sw.asDiagonal() * d.eigenvectors;
  CHECK((U * lam.asDiagonal() * U.transpose() - M).norm() < 1e-9 * M.norm());
}

TEST_CASE("leading eigenvalues stabilize under refinement") {
  for (auto [h1, h2] : {std::pair{0.8, 0.8}, {0.9, 0.7}}) {
    const auto spec = KernelSpec::f_infinity(HurstPair(h1, h2));
    const auto coarse = galerkin_spectrum(spec, with_ppu(64));
    const auto fine = galerkin_spectrum(spec, with_ppu(128));
    for (std::size_t k = 0; k < 5; ++k)
      CHECK(std::abs(coarse.eigenvalues[k] - fine.eigenvalues[k]) < 0.01 * std::abs(fine.eigenvalues[k]));
  }
}

TEST_CASE("leading eigenfunction stays bounded away from the diagonal singularity") {
  const auto spec = KernelSpec::f_infinity(HurstPair(0.8, 0.8));
  const auto d = galerkin_spectrum(spec, with_ppu(64));
  const auto e = galerkin_spectrum(spec, with_ppu(128));
  CHECK(e.eigenvectors.col(0).cwiseAbs().maxCoeff() < 2.0 * d.eigenvectors.col(0).cwiseAbs().maxCoeff());
}

TEST_CASE("exact f_n spectrum carries the full symmetric norm") {
  for (auto [h1, h2] : {std::pair{0.8, 0.8}, {0.9, 0.7}, {0.75, 0.75}}) {
    const HurstPair hp(h1, h2);
    for (int n : {1, 4, 32}) {
      const auto spec = KernelSpec::f_n(hp, n);
      const auto d = exact_finite_rank_spectrum(spec);
      CHECK(d.eigenvalues.size() == static_cast<std::size_t>(2 * n));
      CHECK(d.hs_norm_sq == doctest::Approx(inner_product_sym(spec, spec)).epsilon(1e-9));
    }
  }
  // With equal indices sym f_n = f_n has rank n.
  const auto d = exact_finite_rank_spectrum(KernelSpec::f_n(HurstPair(0.8, 0.8), 8));
  CHECK(verify_hypothesis_H(d, 1e-8 * d.max_abs()).count == 8);
  CHECK_THROWS_AS(exact_finite_rank_spectrum(KernelSpec::f_infinity(HurstPair(0.8, 0.8))), DomainError);
}

TEST_CASE("Galerkin f_n spectrum approaches the exact one") {
  const auto spec = KernelSpec::f_n(HurstPair(0.9, 0.7), 4);
  const auto exact = exact_finite_rank_spectrum(spec);
  const auto gal = galerkin_spectrum(spec, with_ppu(64));
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(gal.eigenvalues[k] == doctest::Approx(exact.eigenvalues[k]).epsilon(0.02));
  CHECK(gal.hs_norm_sq <= exact.hs_norm_sq * (1 + 1e-9));
}

TEST_CASE("hypothesis (H) at the boundary and off-diagonal pairs") {
  for (auto [h1, h2] : {std::pair{0.75, 0.75}, {0.9, 0.7}}) {
    const auto d = galerkin_spectrum(KernelSpec::f_infinity(HurstPair(h1, h2)));
    const auto h = verify_hypothesis_H(d);
    CHECK(h.satisfied);
    CHECK(h.count >= 5);
    CHECK(h.threshold == doctest::Approx(1e-6 * d.max_abs()));
  }
}

TEST_CASE("Galerkin Hilbert-Schmidt mass converges slowly from below") {
  // The diagonal singularity of f_inf keeps a sizeable part of ||f_inf||^2 out
  // of any piecewise-constant discretization; the captured fraction grows
  // with refinement but stays well short of 1 at 64 panels per unit.
  const auto spec = KernelSpec::f_infinity(HurstPair(0.8, 0.8));
  const double norm2 = inner_product_sym(spec, spec);
  double prev = 0.0;
  for (int ppu : {16, 32, 64}) {
    const double frac = galerkin_spectrum(spec, with_ppu(ppu)).hs_norm_sq / norm2;
    CHECK(frac < 1.0);
    CHECK(frac > prev);
    prev = frac;
  }
  CHECK(prev == doctest::Approx(0.78).epsilon(0.03));
}

TEST_CASE("spectrum_for dispatches by kernel kind") {
  const HurstPair hp(0.8, 0.8);
  const auto fn = KernelSpec::f_n(hp, 6);
  CHECK(spectrum_for(fn).eigenvalues == exact_finite_rank_spectrum(fn).eigenvalues);
  CHECK(spectrum_for(KernelSpec::f_infinity(hp), with_ppu(8)).weights.size() > 8);
}

TEST_CASE("Frobenius norm of the Galerkin matrix within 2% of ||f_inf||^2 at 64 panels per unit") {
  // Expected to fail: the piecewise-constant projection misses a part of the
  // diagonal singularity that shrinks only like (panel width)^{4h-3}.
  QuadratureConfig c;
  c.truncation_left = -50.0;
  const auto spec = KernelSpec::f_infinity(HurstPair(0.8, 0.8));
  const Grid g = build_grid(c);
  const double frob = discretize_operator(spec, g, c).squaredNorm();
  CHECK(frob == doctest::Approx(inner_product(spec, spec)).epsilon(0.02));
}
