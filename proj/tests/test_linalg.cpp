#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "blockfw/bounds.hpp"
#include "blockfw/linalg.hpp"
#include "test_util.hpp"

namespace blockfw {
namespace {

TEST(SymMatrix, SymmetrizesSmallAsymmetryAndRejectsLarge) {
  Matrix m(2, 2);
  m << 1.0, 2.0, 2.0 + 1e-13, 3.0;
  const SymMatrix s(m);
  EXPECT_EQ(s(0, 1), s(1, 0));
  m(1, 0) = 2.1;
  EXPECT_THROW(SymMatrix{m}, Error);
  m(1, 0) = std::nan("");
  EXPECT_THROW(SymMatrix{m}, Error);
}

TEST(SymEig, Examples) {
  EXPECT_TRUE(sym_eig(SymMatrix::identity(3)).values.isApprox(Vector::Ones(3)));
  const Vector d = sym_eig(SymMatrix{{2, 0}, {0, -1}}).values;
  EXPECT_DOUBLE_EQ(d(0), -1.0);
  EXPECT_DOUBLE_EQ(d(1), 2.0);
  // G(1, 2, 4): b - (n - 1) a once, b + a three times
  const Vector g = sym_eig(g_matrix(1.0, 2.0, 4)).values;
  EXPECT_NEAR(g(0), -1.0, 1e-12);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(g(k), 3.0, 1e-12);
}

TEST(SymEigProperty, ReconstructsAndIsOrthonormal) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 20);
    const SymMatrix a = testing::random_symmetric(rng, n);
    const auto e = sym_eig(a);
    const Matrix rec = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_LE((rec - a.dense()).norm(), 1e-9 * (1.0 + a.frobenius_norm()));
    EXPECT_LE((e.vectors.transpose() * e.vectors - Matrix::Identity(n, n)).norm(), 1e-10);
    for (Index k = 1; k < n; ++k) EXPECT_LE(e.values(k - 1), e.values(k));
  }
}

TEST(ProjectPsd, Examples) {
  const SymMatrix psd{{2, 1}, {1, 2}};
  EXPECT_LE((project_psd(psd) - psd).frobenius_norm(), 1e-10);
  EXPECT_LE(project_psd(-SymMatrix::identity(2)).frobenius_norm(), 1e-15);
  EXPECT_LE((project_psd(SymMatrix{{3, 0}, {0, -2}}) - SymMatrix{{3, 0}, {0, 0}}).frobenius_norm(),
            1e-12);
}

// Grid over 2x2 PSD candidates [[a, b], [b, c]] with ac >= b^2: none is
// closer to diag(3, -2) than the clipped projection diag(3, 0).
TEST(ProjectPsd, ClippedDiagonalBeatsPsdGrid) {
  const Matrix target = SymMatrix{{3, 0}, {0, -2}}.dense();
  const double best = (target - project_psd(target)).norm();
  EXPECT_NEAR(best, 2.0, 1e-12);
  double grid_best = 1e300;
  for (int ia = 0; ia <= 100; ++ia) {
    for (int ic = 0; ic <= 40; ++ic) {
      for (int ib = -20; ib <= 20; ++ib) {
        const double a = 0.05 * ia, c = 0.05 * ic, b = 0.05 * ib;
        if (a * c < b * b) continue;
        Matrix w(2, 2);
        w << a, b, b, c;
        grid_best = std::min(grid_best, (target - w).norm());
      }
    }
  }
  EXPECT_GE(grid_best, best - 1e-12);
  EXPECT_LE(grid_best, best + 1e-9);
}

TEST(ProjectPsdProperty, NearestAmongRandomPsdPoints) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 20);
    const SymMatrix a = testing::random_symmetric(rng, n);
    const SymMatrix p = project_psd(a);
    EXPECT_GE(min_eigenvalue(p), -1e-9);
    const double d = (a - p).frobenius_norm();
    EXPECT_NEAR(d, dist_psd(a), 1e-9);
    for (int k = 0; k < 100; ++k) {
      const SymMatrix w = testing::random_psd(rng, n, 1 + static_cast<Index>(rng() % n));
      EXPECT_LE(d, (a - w).frobenius_norm() + 1e-12);
    }
  }
}

TEST(DistPsd, Examples) {
  EXPECT_EQ(dist_psd(SymMatrix::identity(4)), 0.0);
  EXPECT_NEAR(dist_psd(SymMatrix{{1, 0}, {0, -3}}), 3.0, 1e-14);
  for (int n : {2, 3, 5, 8}) {
    for (double a : {0.0, 0.3, 1.0}) {
      for (double b : {0.0, 0.5, 2.0, 7.0}) {
        EXPECT_NEAR(dist_psd(g_matrix(a, b, n)), std::max((n - 1) * a - b, 0.0), 1e-12)
            << n << " " << a << " " << b;
      }
    }
  }
}

TEST(DistPsdProperty, OneLipschitz) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 10);
    const SymMatrix a = testing::random_symmetric(rng, n);
    const SymMatrix b = testing::random_symmetric(rng, n);
    EXPECT_LE(std::abs(dist_psd(a) - dist_psd(b)), (a - b).frobenius_norm() + 1e-12);
  }
}

TEST(CholeskyPsd, Examples) {
  const auto id = cholesky_psd(SymMatrix::identity(3), 0.0);
  ASSERT_TRUE(id.ok);
  EXPECT_EQ(id.factor, Matrix(Matrix::Identity(3, 3)));

  const auto f = cholesky_psd(SymMatrix{{4, 2}, {2, 2}}, 0.0);
  ASSERT_TRUE(f.ok);
  Matrix expect(2, 2);
  expect << 2, 0, 1, 1;
  EXPECT_LE((f.factor - expect).norm(), 1e-15);

  EXPECT_FALSE(cholesky_psd(SymMatrix{{1, 2}, {2, 1}}, 1e-9).ok);
  EXPECT_THROW(cholesky_psd(SymMatrix::identity(2), -1.0), Error);
}

TEST(CholeskyPsdProperty, SingularPsdFactors) {
  std::mt19937_64 rng(13);
  const double tol = 1e-8;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 12);
    const SymMatrix a = testing::random_psd(rng, n, 1 + static_cast<Index>(rng() % n));
    const auto f = cholesky_psd(a, tol);
    ASSERT_TRUE(f.ok);
    EXPECT_LE(f.shift, tol);
    EXPECT_LE((f.factor * f.factor.transpose() - a.dense()).norm(), tol * (1.0 + a.frobenius_norm()));
    EXPECT_TRUE(f.factor.isLowerTriangular());
  }
}

TEST(Linalg, GatherScatterRoundTrip) {
  std::mt19937_64 rng(17);
  const SymMatrix a = testing::random_symmetric(rng, 5);
  const std::vector<Index> idx{4, 1, 2};
  const Matrix g = gather(a.dense(), idx);
  EXPECT_EQ(g(0, 1), a(4, 1));
  Matrix z = Matrix::Zero(5, 5);
  scatter_add(z, idx, g, 2.0);
  EXPECT_EQ(z(4, 2), 2.0 * a(4, 2));
  EXPECT_EQ(z(0, 0), 0.0);
}

}  // namespace
}  // namespace blockfw
