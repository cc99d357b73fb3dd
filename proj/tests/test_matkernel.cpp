#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "test_support.hpp"

using namespace qre;
using namespace qre::testing;

TEST(HermEig, DiagonalInput) {
  const HermEig e = herm_eig(diag({0.3, 0.7}));
  EXPECT_NEAR(e.eigenvalues(0), 0.3, 1e-15);
  EXPECT_NEAR(e.eigenvalues(1), 0.7, 1e-15);
  EXPECT_NEAR(std::abs(e.eigenvectors(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.eigenvectors(1, 1)), 1.0, 1e-15);
}

TEST(HermEig, RankOneProjectorTimesOne) {
  CMatrix a(2, 2);
  a << 0.5, 0.5, 0.5, 0.5;
  const HermEig e = herm_eig(a);
  EXPECT_NEAR(e.eigenvalues(0), 0.0, 1e-15);
  EXPECT_NEAR(e.eigenvalues(1), 1.0, 1e-15);
}

TEST(HermEig, RejectsNonHermitian) {
  CMatrix a(2, 2);
  a << 1, 1, 0, 1;
  try {
    herm_eig(a);
    FAIL() << "expected NotHermitian";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
  }
}

TEST(HermEig, ReconstructionAndOrthonormalityOnRandomInputs) {
  std::mt19937_64 gen(11);
  for (int d : {2, 3, 4, 8, 16}) {
    for (int trial = 0; trial < 100; ++trial) {
      const CMatrix a = random_hermitian(d, gen);
      const HermEig e = herm_eig(a);
      const CMatrix rebuilt = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.adjoint();
      EXPECT_LE((a - rebuilt).norm(), 1e-10 * std::max(1.0, a.norm())) << "d=" << d;
      EXPECT_LE((e.eigenvectors.adjoint() * e.eigenvectors - CMatrix::Identity(d, d)).norm(), 1e-10);
      for (Eigen::Index i = 1; i < d; ++i) EXPECT_LE(e.eigenvalues(i - 1), e.eigenvalues(i));
    }
  }
}

TEST(Kron, IdentityAndDiagonalRules) {
  EXPECT_TRUE(kron(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)).isApprox(CMatrix::Identity(4, 4)));
  const CMatrix out = kron(diag({2, 3}), diag({5, 7}));
  EXPECT_TRUE(out.isApprox(diag({10, 14, 15, 21})));
}

TEST(Kron, PermutationAction) {
  const CMatrix xx = kron(pauli_x(), pauli_x());
  CVector e0 = CVector::Zero(4);
  e0(0) = 1.0;
  const CVector image = xx * e0;
  EXPECT_EQ(image(3), Complex(1.0, 0.0));
  EXPECT_NEAR(image.norm(), 1.0, 0.0);
}

TEST(Kron, IndexSemantics) {
  std::mt19937_64 gen(3);
  const CMatrix a = random_matrix(2, gen);
  const CMatrix b = random_matrix(3, gen);
  const CMatrix ab = kron(a, b);
  ASSERT_EQ(ab.rows(), 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 3; ++l) EXPECT_EQ(ab(i * 3 + j, k * 3 + l), a(i, k) * b(j, l));
}

TEST(Kron, Associativity) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_matrix(2, gen), b = random_matrix(3, gen), c = random_matrix(2, gen);
    EXPECT_LE((kron(kron(a, b), c) - kron(a, kron(b, c))).norm(), 1e-12);
  }
}

TEST(Kron, DimensionCap) {
  const CMatrix a = CMatrix::Identity(64, 64);
  EXPECT_NO_THROW(kron(a, a));
  try {
    kron(a, a, 1000);
    FAIL() << "expected DimensionOverflow";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionOverflow);
  }
  EXPECT_THROW(kron_power(CMatrix::Identity(2, 2), 13), Error);
}

TEST(MatLogOnSupport, ScalarCases) {
  EXPECT_LE(mat_log_on_support(diag({1.0}), 1e-12).log.norm(), 1e-15);

  const double e = std::exp(1.0);
  const auto l = mat_log_on_support(diag({e, e * e}), 1e-12);
  EXPECT_LE((l.log - diag({1.0, 2.0})).norm(), 1e-14);
}

TEST(MatLogOnSupport, RestrictsToSupport) {
  const auto l = mat_log_on_support(diag({0.5, 0.0}), 1e-12);
  EXPECT_LE((l.log - diag({std::log(0.5), 0.0})).norm(), 1e-15);
  // eigenvalues ascend: index 0 is the zero eigenvalue
  ASSERT_EQ(l.support.size(), 2u);
  EXPECT_FALSE(l.support[0]);
  EXPECT_TRUE(l.support[1]);
}

TEST(MatLogOnSupport, ZeroMatrixGivesZero) {
  EXPECT_LE(mat_log_on_support(CMatrix::Zero(3, 3), 1e-12).log.norm(), 0.0);
}

TEST(MatLogOnSupport, InvertsExponential) {
  std::mt19937_64 gen(17);
  for (int d : {2, 3, 5}) {
    for (int trial = 0; trial < 20; ++trial) {
      const CMatrix h = random_hermitian(d, gen);
      const CMatrix a = h.exp();  // independent route: Padé-based exponential
      const auto l = mat_log_on_support(0.5 * (a + a.adjoint()), 1e-12);
      EXPECT_LE((l.log - h).norm(), 1e-9) << "d=" << d;
    }
  }
}

TEST(CommNorm, KnownValues) {
  EXPECT_EQ(comm_norm(diag({1, 2}), diag({3, 4})), 0.0);
  // XZ − ZX = −2iY, ‖2Y‖_F = 2√2
  EXPECT_NEAR(comm_norm(pauli_x(), pauli_z()), 2.0 * std::sqrt(2.0), 1e-15);
  std::mt19937_64 gen(2);
  EXPECT_EQ(comm_norm(random_matrix(3, gen), CMatrix::Identity(3, 3)), 0.0);
}

TEST(CommNorm, DimensionMismatch) {
  try {
    comm_norm(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}
