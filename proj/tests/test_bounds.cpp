#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "blockfw/bounds.hpp"
#include "test_util.hpp"

namespace blockfw {
namespace {

TEST(UpperBound, Examples) {
  EXPECT_EQ(upper_bound_dist(2), Fraction::make(0, 1));
  EXPECT_EQ(upper_bound_dist(4), Fraction::make(1, 2));
  EXPECT_DOUBLE_EQ(upper_bound_dist(4).value(), 0.5);
  EXPECT_NEAR(upper_bound_dist(100).value(), 0.98, 1e-15);
  EXPECT_EQ(upper_bound_dist(6), (Fraction{2, 3}));
  EXPECT_THROW(upper_bound_dist(1), Error);
}

TEST(LowerBound, Examples) {
  // (1/3) / sqrt(24/9 - 4/3 + 1) = (1/3) / sqrt(7/3)
  EXPECT_NEAR(lower_bound_dist(6, 3), 1.0 / 3.0 / std::sqrt(7.0 / 3.0), 1e-15);
  EXPECT_NEAR(lower_bound_dist(6, 3), 0.21822, 1e-5);
  EXPECT_EQ(lower_bound_dist(10, 2), 0.0);
  EXPECT_THROW(lower_bound_dist(6, 1), Error);
  EXPECT_THROW(lower_bound_dist(2, 3), Error);
}

TEST(LowerBound, NeverExceedsUpperBound) {
  for (int n = 2; n <= 100; ++n) {
    for (int p = 2; p <= n; ++p) {
      if (n % p) continue;
      EXPECT_LE(lower_bound_dist(n, p), upper_bound_dist(p).value() + 1e-15) << n << " " << p;
    }
  }
}

TEST(GMatrix, EntriesAndSpectrum) {
  EXPECT_EQ(g_matrix(0.0, 2.5, 3), SymMatrix::identity(3) * 2.5);
  const SymMatrix g = g_matrix(0.5, 1.0, 3);
  EXPECT_EQ(g(0, 0), 1.0);
  EXPECT_EQ(g(0, 1), -0.5);
  for (int n = 1; n <= 9; ++n) {
    for (double a : {-1.0, 0.0, 0.25, 2.0}) {
      for (double b : {0.0, 1.0, 3.0}) {
        const Vector e = sym_eig(g_matrix(a, b, n)).values;
        std::vector<double> expect(static_cast<std::size_t>(n), b + a);
        expect[0] = b - (n - 1) * a;
        std::sort(expect.begin(), expect.end());
        for (int k = 0; k < n; ++k) EXPECT_NEAR(e(k), expect[k], 1e-9);
      }
    }
  }
}

TEST(Witness, HomogeneousCases) {
  for (auto [n, p] : {std::pair{4, 2}, {6, 3}, {8, 4}, {12, 4}, {12, 6}, {9, 3}}) {
    const Witness w = worst_case_witness(n, p);
    EXPECT_NEAR(w.matrix.frobenius_norm(), 1.0, 1e-10);
    EXPECT_TRUE(dual_membership(w.matrix, Partition::homogeneous(n, p), 1e-12).member);
    EXPECT_NEAR(dist_psd(w.matrix), w.distance, 1e-9);
    EXPECT_NEAR(dist_psd(w.matrix), lower_bound_dist(n, p), 1e-9);
  }
  EXPECT_NEAR(worst_case_witness(6, 3).distance, 0.21822, 1e-5);
  EXPECT_LE(worst_case_witness(8, 2).distance, 1e-15);
  EXPECT_TRUE(is_psd(worst_case_witness(8, 2).matrix));
  EXPECT_THROW(worst_case_witness(7, 3), Error);
}

TEST(DualHat, DiagonalCase) {
  const int n = 6;
  const Partition alpha = make_partition({1, 2, 3});
  const DualHat h = dual_hat(SymMatrix::identity(n) * (1.0 / std::sqrt(n)), alpha);
  EXPECT_LE((h.m_hat - SymMatrix::identity(n) * (2.0 / std::sqrt(n))).frobenius_norm(), 1e-12);
  EXPECT_NEAR(h.residual, 1.0 / 3.0, 1e-12);
}

TEST(DualHat, TwoBlocksIsExact) {
  std::mt19937_64 rng(3);
  const SymMatrix m = testing::random_psd(rng, 5, 5);
  const DualHat h = dual_hat(m, make_partition({3, 2}));
  EXPECT_NEAR(h.residual, 0.0, 1e-12);
  EXPECT_LE((h.m_hat - m * (1.0 / m.frobenius_norm())).frobenius_norm(), 1e-12);
}

TEST(DualHat, RejectsNonMembers) {
  EXPECT_THROW(dual_hat(-SymMatrix::identity(4), Partition::trivial(4)), Error);
  EXPECT_THROW(dual_hat(SymMatrix::identity(4), make_partition({4})), Error);
}

// Unit-norm matrix on the boundary of the dual cone: a random symmetric
// matrix shifted until its worst pair submatrix is singular.
SymMatrix random_dual_member(std::mt19937_64& rng, const Partition& alpha) {
  SymMatrix m = testing::random_symmetric(rng, alpha.dim());
  const double worst = dual_membership(m, alpha, 0.0).worst_min_eig;
  m = m - SymMatrix::identity(alpha.dim()) * (worst - 1e-9);
  return m * (1.0 / m.frobenius_norm());
}

TEST(DualHatProperty, SandwichesTheProjectionDistance) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 10);
    const Partition alpha = testing::random_partition(rng, n);
    if (alpha.num_blocks() < 2) continue;
    const SymMatrix m = random_dual_member(rng, alpha);
    const DualHat h = dual_hat(m, alpha);
    const double p = alpha.num_blocks();
    EXPECT_NEAR(h.residual, (p - 2.0) / p, 1e-9);
    EXPECT_TRUE(validate_decomposition(
                    [&] {
                      FwDecomposition d{alpha, {}};
                      for (const BlockPair& bp : block_pairs(alpha)) {
                        d.blocks.emplace(bp, SymMatrix(truncate(m.dense(), alpha, bp)));
                      }
                      return d;
                    }(),
                    h.m_hat, 1e-9)
                    .passed);
    const double proj = project_fw(m, alpha, 2000, 1e-10).distance;
    EXPECT_LE(proj, h.residual + 1e-9);
  }
}

}  // namespace
}  // namespace blockfw
