#include <gtest/gtest.h>

#include "fairpca/linalg.hpp"
#include "oracles.hpp"

#include <cmath>
#include <limits>

using namespace fairpca;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

} // namespace

TEST(Linalg, RequireFiniteRejectsNan) {
  Matrix m = Matrix::Ones(2, 2);
  m(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(require_finite(m, "m"), InputError);
  m(1, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(thin_svd(m), InputError);
}

TEST(Linalg, SemiOrthogonalRejectsLooseOrWide) {
  EXPECT_THROW(SemiOrthogonal(Matrix::Identity(2, 2) * 1.01), InputError);
  EXPECT_THROW(SemiOrthogonal(Matrix::Identity(2, 3)), InputError);
  SemiOrthogonal u(Matrix::Identity(3, 2));
  EXPECT_LE(u.tightness(), 1e-15);
  EXPECT_NEAR((u.projector() - Matrix::Identity(3, 2) * Matrix::Identity(2, 3)).norm(), 0.0, 1e-15);
}

TEST(Linalg, ThinSvdDiagonal) {
  const ThinSvd s = thin_svd(diag2(3, 4));
  EXPECT_NEAR(s.singulars(0), 4.0, 1e-14);
  EXPECT_NEAR(s.singulars(1), 3.0, 1e-14);
}

TEST(Linalg, ThinSvdZero) {
  const ThinSvd s = thin_svd(Matrix::Zero(3, 2));
  ASSERT_EQ(s.singulars.size(), 2);
  EXPECT_EQ(s.singulars(0), 0.0);
  EXPECT_EQ(s.singulars(1), 0.0);
}

TEST(Linalg, ThinSvdReconstructsRandom) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = oracle::gaussian(5, 3, rng);
    const ThinSvd s = thin_svd(a);
    EXPECT_LT((s.left * s.singulars.asDiagonal() * s.right.transpose() - a).norm(), 1e-10 * a.norm());
    EXPECT_LT((s.left.transpose() * s.left - Matrix::Identity(3, 3)).norm(), 1e-10);
    EXPECT_LT((s.right.transpose() * s.right - Matrix::Identity(3, 3)).norm(), 1e-10);
    for (Eigen::Index i = 0; i < 3; ++i) {
      EXPECT_GE(s.singulars(i), 0.0);
      if (i > 0) {
        EXPECT_LE(s.singulars(i), s.singulars(i - 1));
      }
    }
  }
}

TEST(Linalg, ThinSvdRejectsWide) { EXPECT_THROW(thin_svd(Matrix::Ones(2, 3)), InputError); }

TEST(Linalg, NuclearNormExamples) {
  EXPECT_NEAR(nuclear_norm(diag2(3, 4)), 7.0, 1e-14);
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  EXPECT_NEAR(nuclear_norm(swap), 2.0, 1e-14);
  EXPECT_EQ(nuclear_norm(Matrix::Zero(3, 2)), 0.0);
}

TEST(Linalg, NuclearNormMatchesSingularValueSum) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = oracle::gaussian(6, 4, rng);
    EXPECT_NEAR(nuclear_norm(a), oracle::nuclear(a), 1e-10);
  }
}

TEST(Linalg, PolarFactorIdentity) {
  EXPECT_LT((polar_factor(Matrix::Identity(3, 3)).matrix() - Matrix::Identity(3, 3)).norm(), 1e-14);
}

TEST(Linalg, PolarFactorScaledColumns) {
  Matrix a = Matrix::Zero(3, 2);
  a(0, 0) = 2;
  a(1, 1) = 3;
  EXPECT_LT((polar_factor(a).matrix() - Matrix::Identity(3, 2)).norm(), 1e-14);
}

TEST(Linalg, PolarFactorVonNeumannEquality) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = oracle::gaussian(4, 2, rng);
    const SemiOrthogonal u = polar_factor(a);
    EXPECT_NEAR((a.transpose() * u.matrix()).trace(), oracle::nuclear(a), 1e-9);
    EXPECT_LE(u.tightness(), 1e-8);
  }
}

TEST(Linalg, PolarFactorMatchesClosedFormOnFullRank) {
  std::mt19937_64 rng(4);
  const Matrix a = oracle::gaussian(6, 3, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.transpose() * a);
  const Matrix inv_root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                          es.eigenvectors().transpose();
  EXPECT_LT((polar_factor(a).matrix() - a * inv_root).norm(), 1e-10);
}

TEST(Linalg, PolarFactorVonNeumannInequality) {
  std::mt19937_64 rng(5);
  const Matrix a = oracle::gaussian(5, 3, rng);
  const double bound = oracle::nuclear(a);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix v = oracle::feasible_v(5, 3, rng);
    EXPECT_LE((a.transpose() * v).trace(), bound + 1e-9);
  }
}

TEST(Linalg, PolarFactorRankDeficientCompletion) {
  // Zero input: completion from e_1, e_2 in order.
  EXPECT_LT((polar_factor(Matrix::Zero(3, 2)).matrix() - Matrix::Identity(3, 2)).norm(), 1e-14);

  // Rank one: the null direction is completed deterministically and the
  // Von Neumann equality still holds.
  Matrix a = Matrix::Zero(3, 2);
  a(2, 0) = 5.0;
  const SemiOrthogonal u = polar_factor(a);
  EXPECT_LE(u.tightness(), 1e-12);
  EXPECT_NEAR((a.transpose() * u.matrix()).trace(), 5.0, 1e-12);
  EXPECT_LT((polar_factor(a).matrix() - u.matrix()).norm(), 1e-15);

  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix low = oracle::gaussian(6, 2, rng) * oracle::gaussian(2, 4, rng);
    const SemiOrthogonal v = polar_factor(low);
    EXPECT_LE(v.tightness(), 1e-8);
    EXPECT_NEAR((low.transpose() * v.matrix()).trace(), oracle::nuclear(low), 1e-9 * (1 + low.norm()));
  }
}

TEST(Linalg, InvSqrtExamples) {
  EXPECT_LT((inv_sqrt_psd(Matrix::Identity(3, 3), 0.0) - Matrix::Identity(3, 3)).norm(), 1e-14);
  EXPECT_LT((inv_sqrt_psd(diag2(4, 9), 0.0) - diag2(0.5, 1.0 / 3.0)).norm(), 1e-14);
}

TEST(Linalg, InvSqrtRoundTrip) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix s = oracle::random_psd(4, 8, rng);
    const Matrix r = inv_sqrt_psd(s);
    EXPECT_LT((r * r * s - Matrix::Identity(4, 4)).norm(), 1e-8);
    EXPECT_LT((r - r.transpose()).norm(), 1e-12 * r.norm());
  }
}

TEST(Linalg, InvSqrtRidgeFloorsEigenvalues) {
  const Matrix r = inv_sqrt_psd(diag2(4, 0), 1e-2);
  EXPECT_NEAR(r(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(r(1, 1), 10.0, 1e-10);
  // default ridge keeps the result finite on a singular input
  EXPECT_TRUE(inv_sqrt_psd(diag2(1, 0)).allFinite());
  EXPECT_TRUE(inv_sqrt_psd(Matrix::Zero(2, 2)).allFinite());
}

TEST(Linalg, InvSqrtErrors) {
  EXPECT_THROW(inv_sqrt_psd(diag2(1, -1), 0.0), InputError);
  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  EXPECT_THROW(inv_sqrt_psd(asym, 0.0), InputError);
  EXPECT_THROW(inv_sqrt_psd(diag2(1, 0), 0.0), InputError);
  EXPECT_THROW(inv_sqrt_psd(Matrix::Identity(2, 2), -1.0), InputError);
}

TEST(Linalg, PhiStarProperty) {
  std::mt19937_64 rng(8);
  const Matrix a = oracle::gaussian(5, 3, rng);
  const Matrix ata = a.transpose() * a;
  const double target = 2.0 * oracle::nuclear(a);
  auto value = [&](const Matrix& phi) { return phi.inverse().trace() + (ata * phi).trace(); };
  const Matrix phi_star = inv_sqrt_psd(ata, 0.0);
  EXPECT_NEAR(value(phi_star), target, 1e-8 * target);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix g = oracle::gaussian(3, 3, rng) * 0.3;
    Matrix phi = phi_star + g * g.transpose();
    if (trial % 2) phi = phi_star * (0.5 + 0.01 * trial);
    EXPECT_GE(value(phi), target - 1e-8);
  }
}

TEST(Linalg, RandomSemiOrthogonal) {
  const SemiOrthogonal sq = random_semi_orthogonal(3, 3, 11);
  EXPECT_LT((sq.matrix() * sq.matrix().transpose() - Matrix::Identity(3, 3)).norm(), 1e-10);
  EXPECT_EQ(random_semi_orthogonal(10, 4, 42).matrix(), random_semi_orthogonal(10, 4, 42).matrix());
  EXPECT_NE(random_semi_orthogonal(10, 4, 42).matrix(), random_semi_orthogonal(10, 4, 43).matrix());
  EXPECT_LE(random_semi_orthogonal(10, 4, 42).tightness(), 1e-10);
  EXPECT_THROW(random_semi_orthogonal(2, 3, 0), InputError);
}

TEST(Linalg, SymmetricEigenOrderAndSigns) {
  Matrix s = Matrix::Zero(3, 3);
  s(0, 0) = 1;
  s(1, 1) = 5;
  s(2, 2) = 3;
  const SymmetricEigen e = symmetric_eigen(s);
  EXPECT_NEAR(e.values(0), 5, 1e-14);
  EXPECT_NEAR(e.values(2), 1, 1e-14);
  EXPECT_NEAR(e.vectors(1, 0), 1.0, 1e-14); // largest entry positive
  EXPECT_NEAR(e.vectors(2, 1), 1.0, 1e-14);
}

TEST(Linalg, SymmetricEigenTieBreakIsDeterministic) {
  // Identity: every basis is an eigenbasis. The solver's basis vectors are
  // canonicalized and sorted lexicographically, smallest first: e_3, e_2, e_1.
  const SymmetricEigen e = symmetric_eigen(Matrix::Identity(3, 3));
  EXPECT_LT((e.vectors.cwiseAbs() - Matrix::Identity(3, 3).rowwise().reverse()).norm(), 1e-12);
  EXPECT_EQ(symmetric_eigen(Matrix::Identity(3, 3)).vectors, e.vectors);
}

TEST(Linalg, PcaBaselineDiagonal) {
  Matrix s = Matrix::Zero(3, 3);
  s(0, 0) = 5;
  s(1, 1) = 3;
  s(2, 2) = 1;
  const SemiOrthogonal u = pca_baseline(s, 2);
  EXPECT_NEAR((u.matrix().transpose() * s * u.matrix()).trace(), 8.0, 1e-12);
  EXPECT_LT((u.projector() - Matrix::Identity(3, 2) * Matrix::Identity(2, 3)).norm(), 1e-12);
}

TEST(Linalg, PcaBaselineDegenerateSpectrum) {
  const SemiOrthogonal u = pca_baseline(Matrix::Identity(4, 4), 1);
  EXPECT_NEAR(u.matrix().squaredNorm(), 1.0, 1e-14);
  EXPECT_EQ(u.matrix(), pca_baseline(Matrix::Identity(4, 4), 1).matrix());
}

TEST(Linalg, PcaBaselineMatchesEigenOracle) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix s = oracle::random_psd(7, 12, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    const double top3 = es.eigenvalues().tail(3).sum();
    const SemiOrthogonal u = pca_baseline(s, 3);
    EXPECT_NEAR((u.matrix().transpose() * s * u.matrix()).trace(), top3, 1e-9 * top3);
  }
  EXPECT_THROW(pca_baseline(Matrix::Identity(2, 2), 3), InputError);
}

TEST(Linalg, ProjectorDistance) {
  const Matrix e1 = Matrix::Identity(2, 1);
  Matrix e2 = Matrix::Zero(2, 1);
  e2(1, 0) = 1;
  EXPECT_NEAR(projector_distance(e1, e2), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(projector_distance(e1, -e1), 0.0, 1e-14);
}
