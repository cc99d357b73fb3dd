#include <gtest/gtest.h>

#include <algorithm>

#include "test_support.hpp"

using namespace qre;
using namespace qre::testing;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidArgument;
}

void expect_spectral_invariants(const SpectralPvm& s, const CMatrix& source) {
  const auto d = source.rows();
  CMatrix sum = CMatrix::Zero(d, d);
  CMatrix rebuilt = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& p = s.projectors[i];
    EXPECT_LE((p * p - p).norm(), 1e-9);
    for (std::size_t j = i + 1; j < s.size(); ++j) EXPECT_LE((p * s.projectors[j]).norm(), 1e-9);
    sum += p;
    rebuilt += s.eigenvalues[i] * p;
  }
  EXPECT_LE((sum - CMatrix::Identity(d, d)).norm(), 1e-9);
  EXPECT_LE((rebuilt - source).norm(), 1e-8);
}

}  // namespace

TEST(ValidateState, AcceptsMaximallyMixed) { EXPECT_NO_THROW(validate_state(diag({0.5, 0.5}))); }

TEST(ValidateState, NamesViolatedInvariant) {
  EXPECT_EQ(kind_of([] { validate_state(diag({0.7, 0.4})); }), ErrorKind::TraceNotOne);

  // eigenvalues 0.5 ± 0.6 = 1.1, −0.1
  CMatrix m(2, 2);
  m << 0.5, 0.6, 0.6, 0.5;
  EXPECT_EQ(kind_of([&] { validate_state(m); }), ErrorKind::NotPSD);

  CMatrix nh(2, 2);
  nh << 0.5, 0.1, 0.0, 0.5;
  EXPECT_EQ(kind_of([&] { validate_state(nh); }), ErrorKind::NotHermitian);
}

TEST(SpectralPvm, DiagonalState) {
  const auto s = spectral_pvm(diagonal_state({0.7, 0.3}));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s.eigenvalues[0], 0.7, 1e-15);
  EXPECT_NEAR(s.eigenvalues[1], 0.3, 1e-15);
  EXPECT_LE((s.projectors[0] - diag({1, 0})).norm(), 1e-14);
  EXPECT_LE((s.projectors[1] - diag({0, 1})).norm(), 1e-14);
}

TEST(SpectralPvm, FullDegeneracy) {
  const auto s = spectral_pvm(diagonal_state({0.5, 0.5}));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s.eigenvalues[0], 0.5, 1e-15);
  EXPECT_LE((s.projectors[0] - CMatrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(SpectralPvm, RepeatedEigenvalue) {
  const auto s = spectral_pvm(diagonal_state({0.5, 0.25, 0.25}));
  EXPECT_EQ(s.ranks(), (std::vector<std::size_t>{1, 2}));
}

TEST(SpectralPvm, KernelBlockIsExplicit) {
  const auto s = spectral_pvm(diagonal_state({0.6, 0.4, 0.0}));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.eigenvalues.back(), 0.0);
  EXPECT_TRUE(std::isinf(s.log_eigenvalues.back()));
}

TEST(SpectralPvm, InvariantsOnRandomStates) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto rho = random_state(2 + static_cast<int>(seed % 3), seed);
    expect_spectral_invariants(spectral_pvm(rho), rho.mat());
  }
}

TEST(TensorPower, SmallCases) {
  const auto rho = diagonal_state({0.7, 0.3});
  EXPECT_EQ(tensor_power(rho, 1).mat(), rho.mat());
  EXPECT_LE((tensor_power(rho, 2).mat() - diag({0.49, 0.21, 0.21, 0.09})).norm(), 1e-15);
  EXPECT_THROW(tensor_power(rho, 13), Error);
}

TEST(TensorPower, EigenvaluesAreTripleProducts) {
  const auto rho = random_state(3, 42);
  const RVector p = herm_eig(rho.mat()).eigenvalues;
  std::vector<double> products;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) products.push_back(p(a) * p(b) * p(c));
  std::sort(products.begin(), products.end());
  const RVector built = herm_eig(tensor_power(rho, 3).mat()).eigenvalues;
  ASSERT_EQ(built.size(), 27);
  for (int i = 0; i < 27; ++i) EXPECT_NEAR(built(i), products[static_cast<std::size_t>(i)], 1e-14);
}

TEST(SpectralPvmOfPower, ProductMultisetGrouping) {
  const auto s = spectral_pvm_of_power(diagonal_state({0.7, 0.3}), 2);
  EXPECT_EQ(s.ranks(), (std::vector<std::size_t>{1, 2, 1}));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s.eigenvalues[0], 0.49, 1e-15);
  EXPECT_NEAR(s.eigenvalues[1], 0.21, 1e-15);
  EXPECT_NEAR(s.eigenvalues[2], 0.09, 1e-15);
}

TEST(SpectralPvmOfPower, FullDegeneracy) {
  const auto s = spectral_pvm_of_power(diagonal_state({0.5, 0.5}), 3);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_LE((s.projectors[0] - CMatrix::Identity(8, 8)).norm(), 1e-13);
}

TEST(SpectralPvmOfPower, BinomialRanksAndDenseCrossCheck) {
  const auto rho = random_state(2, 7);
  const auto s = spectral_pvm_of_power(rho, 3);
  EXPECT_EQ(s.ranks(), (std::vector<std::size_t>{1, 3, 3, 1}));
  const auto dense = spectral_pvm(tensor_power(rho, 3), 1e-6);
  EXPECT_EQ(dense.ranks(), (std::vector<std::size_t>{1, 3, 3, 1}));
  expect_spectral_invariants(s, tensor_power(rho, 3).mat());
}

TEST(SpectralPvmOfPower, SamePinchingAsDenseSpectralPvm) {
  std::mt19937_64 gen(99);
  for (auto [k, n] : {std::pair{2, 3}, std::pair{2, 4}, std::pair{3, 2}}) {
    const auto rho = random_state(k, 100 + static_cast<std::uint64_t>(k * 10 + n));
    const auto combinatorial = Pvm::from_spectral(spectral_pvm_of_power(rho, n));
    const auto dense = Pvm::from_spectral(spectral_pvm(tensor_power(rho, n), 1e-6));
    ASSERT_EQ(combinatorial.size(), dense.size());
    const int d = static_cast<int>(combinatorial.dim());
    std::size_t rank_total = 0;
    for (auto r : combinatorial.ranks()) rank_total += r;
    EXPECT_EQ(rank_total, static_cast<std::size_t>(d));
    for (int t = 0; t < 20; ++t) {
      const CMatrix a = random_matrix(d, gen);
      EXPECT_LE((pinch(combinatorial, a) - pinch(dense, a)).norm(), 1e-8);
    }
  }
}

TEST(SpectralPvmOfPower, KernelTuplesFormOneBlock) {
  const auto s = spectral_pvm_of_power(diagonal_state({1.0, 0.0}), 2);
  EXPECT_EQ(s.ranks(), (std::vector<std::size_t>{1, 3}));
  EXPECT_TRUE(std::isinf(s.log_eigenvalues[1]));
}

TEST(RandomState, DeterministicPerSeed) {
  const auto a = random_state(2, 1234);
  const auto b = random_state(2, 1234);
  EXPECT_TRUE((a.mat().array() == b.mat().array()).all());
  EXPECT_FALSE((a.mat().array() == random_state(2, 1235).mat().array()).all());
}

TEST(RandomState, ValidAndFullRank) {
  EXPECT_NO_THROW(validate_state(random_state(2, 5).mat()));
  double worst = 1.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    worst = std::min(worst, herm_eig(random_state(3, seed).mat()).eigenvalues(0));
  }
  EXPECT_GT(worst, 0.0);
}

TEST(BlochState, MatchesPauliExpansion) {
  const auto rho = bloch_state(0.5, 0.0, 0.2);
  const CMatrix expected = 0.5 * (CMatrix::Identity(2, 2) + 0.5 * pauli_x() + 0.2 * pauli_z());
  EXPECT_LE((rho.mat() - expected).norm(), 1e-15);
  EXPECT_THROW(bloch_state(1.0, 1.0, 0.0), Error);
}
