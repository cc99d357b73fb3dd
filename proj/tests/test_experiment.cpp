#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace qre;
using namespace qre::testing;

namespace {

SweepOptions range(int n_min, int n_max) {
  SweepOptions o;
  o.n_min = n_min;
  o.n_max = n_max;
  return o;
}

void expect_clean(const SweepResult& res) {
  for (const auto& r : res.records) {
    const auto v = record_violations(r);
    EXPECT_TRUE(v.empty()) << v.front();
  }
}

}  // namespace

TEST(UniversalPvm, MaximallyMixedGivesIsotypic) {
  const auto m = universal_pvm(diagonal_state({0.5, 0.5}), 2);
  const auto iso = isotypic_pvm(2, 2);
  ASSERT_EQ(m.pvm.size(), iso.pvm.size());
  for (std::size_t i = 0; i < m.pvm.size(); ++i) EXPECT_LE((m.pvm.elements()[i] - iso.pvm.elements()[i]).norm(), 1e-12);
  EXPECT_EQ(m.irreducible_width, 3u);
}

TEST(UniversalPvm, DiagonalQubitPair) {
  const auto m = universal_pvm(diagonal_state({0.7, 0.3}), 2);
  EXPECT_EQ(m.pvm.size(), 4u);
  EXPECT_EQ(m.isotypic_index, (std::vector<std::size_t>{0, 0, 0, 1}));
  EXPECT_EQ(m.spectral_index, (std::vector<std::size_t>{0, 1, 2, 1}));
}

TEST(UniversalPvm, SingleCopyIsSpectralPvm) {
  const auto rho = random_state(3, 6);
  const auto m = universal_pvm(rho, 1);
  const auto spec = spectral_pvm(rho);
  ASSERT_EQ(m.pvm.size(), spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) EXPECT_LE((m.pvm.elements()[i] - spec.projectors[i]).norm(), 1e-12);
}

TEST(UniversalPvm, RefinesBothFactorsAndIsValid) {
  for (auto [k, n] : {std::pair{2, 4}, std::pair{3, 3}}) {
    const auto rho = random_state(k, 10);
    const auto iso = isotypic_pvm(n, k);
    const auto m = universal_pvm(iso, rho);
    EXPECT_LE(pvm_defects(m.pvm.elements()).worst(), 1e-9);
    EXPECT_TRUE(refines(m.pvm, iso.pvm).refines);
    EXPECT_TRUE(refines(m.pvm, Pvm::from_spectral(spectral_pvm_of_power(rho, n))).refines);
  }
}

TEST(UniversalPvm, ExactRhoDistributionMatchesDenseTrace) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto rho = random_state(2, seed);
    const auto m = universal_pvm(rho, 4);
    const auto exact = m.rho_distribution();
    const auto dense = measure(m.pvm.elements(), tensor_power(rho, 4).mat());
    ASSERT_EQ(exact.size(), dense.size());
    double total = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      EXPECT_NEAR(exact.probs[i], dense.probs[i], 1e-12);
      total += exact.probs[i];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(UniversalPvm, DimensionMismatch) {
  EXPECT_THROW(universal_pvm(isotypic_pvm(2, 3), random_state(2, 0)), Error);
}

TEST(Sweep, IdenticalStates) {
  const auto rho = random_state(2, 3);
  const auto res = run_sweep(rho, rho, range(1, 6));
  ASSERT_EQ(res.records.size(), 6u);
  for (const auto& r : res.records) {
    EXPECT_NEAR(r.target, 0.0, 1e-12);
    EXPECT_NEAR(r.measured_rate, 0.0, 1e-9);
    EXPECT_NEAR(r.gap, 0.0, 1e-9);
  }
  expect_clean(res);
}

TEST(Sweep, CommutingStatesHaveNoGap) {
  const auto res = run_sweep(diagonal_state({0.6, 0.4}), diagonal_state({0.2, 0.8}), range(1, 8));
  for (const auto& r : res.records) {
    EXPECT_NEAR(r.gap, 0.0, 1e-9) << r.n;
    EXPECT_NEAR(r.pinched_rate, r.target, 1e-9) << r.n;
  }
  expect_clean(res);
}

TEST(Sweep, ReferencePair) {
  const auto rho = diagonal_state({0.6, 0.4});
  const auto sigma = bloch_state(0.5, 0.0, 0.2);
  const auto res = run_sweep(rho, sigma, SweepOptions{});
  ASSERT_EQ(res.records.size(), 8u);
  EXPECT_TRUE(res.finite);
  for (int n = 1; n <= 8; ++n) {
    const auto& r = res.records[static_cast<std::size_t>(n - 1)];
    EXPECT_EQ(r.n, n);
    EXPECT_EQ(r.bound, std::log(n + 1.0) / n);
  }
  EXPECT_NEAR(res.records.back().bound, 0.274653, 1e-6);
  EXPECT_LT(res.records.back().gap, res.records.front().gap);
  expect_clean(res);

  // n = 1 reads out in ρ's eigenbasis
  const double d_e = measured_divergence(Pvm::from_spectral(spectral_pvm(rho)), sigma, rho).value();
  EXPECT_NEAR(res.records.front().measured_rate, d_e, 1e-12);
}

TEST(Sweep, RandomPairsRespectBounds) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    expect_clean(run_sweep(random_state(2, seed), random_state(2, seed + 20), range(1, 6)));
  }
  const auto q = run_sweep(random_state(3, 1), random_state(3, 2), range(1, 4));
  expect_clean(q);
  for (const auto& r : q.records) EXPECT_EQ(r.bound, 2.0 * std::log(r.n + 1.0) / r.n);
}

TEST(Sweep, Deterministic) {
  SweepConfig cfg;
  cfg.rho_spec = "random:2";
  cfg.sigma_spec = "random:2";
  cfg.seed = 9;
  cfg.options = range(1, 5);
  const auto a = run_sweep(cfg);
  const auto b = run_sweep(cfg);
  EXPECT_EQ(sweep_csv(a.records), sweep_csv(b.records));
  cfg.seed = 10;
  EXPECT_NE(sweep_csv(a.records), sweep_csv(run_sweep(cfg).records));
}

TEST(Sweep, SupportViolationIsNonFinite) {
  const auto res = run_sweep(diagonal_state({1.0, 0.0}), bloch_state(0.3, 0.0, 0.1), range(1, 3));
  EXPECT_FALSE(res.finite);
  for (const auto& r : res.records) EXPECT_TRUE(std::isinf(r.target));
  expect_clean(res);
  EXPECT_NE(sweep_csv(res.records).find("inf"), std::string::npos);
  EXPECT_EQ(sweep_json(res)["finite"], false);
}

TEST(Sweep, RejectsBadRanges) {
  EXPECT_THROW(run_sweep(random_state(2, 0), random_state(2, 1), range(0, 3)), Error);
  EXPECT_THROW(run_sweep(random_state(2, 0), random_state(2, 1), range(4, 3)), Error);
  try {
    run_sweep(random_state(3, 0), random_state(3, 1), range(1, 9));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionOverflow);
  }
  EXPECT_THROW(run_sweep(random_state(3, 0), random_state(2, 1), range(1, 2)), Error);
}

TEST(Sweep, CsvAndJsonShape) {
  const auto res = run_sweep(diagonal_state({0.6, 0.4}), bloch_state(0.5, 0.0, 0.2), range(1, 2));
  const auto csv = sweep_csv(res.records);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,target_nats,measured_rate,pinched_rate,gap,bound,outcomes");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  const auto j = sweep_json(res);
  ASSERT_EQ(j["records"].size(), 2u);
  EXPECT_EQ(j["records"][1]["n"], 2);
  EXPECT_DOUBLE_EQ(j["records"][1]["bound"].get<double>(), std::log(3.0) / 2);
  EXPECT_NE(plot_script("sweep.csv").find("'sweep.csv'"), std::string::npos);
}

TEST(WidthBoundCheck, CommonEigenbasisIsTight) {
  const CMatrix u = random_unitary(3, 2);
  const auto sigma = validate_state(u * diag({0.1, 0.6, 0.3}) * u.adjoint());
  const auto rho = validate_state(u * diag({0.3, 0.3, 0.4}) * u.adjoint());
  const auto e = Pvm::from_basis(u);
  const auto rep = check_theorem2_instance(e, e, sigma, rho);
  EXPECT_TRUE(rep.hypotheses_hold);
  EXPECT_TRUE(rep.passed());
  EXPECT_NEAR(rep.measured, rep.exact, 1e-9);
  EXPECT_EQ(rep.width, 1u);
}

TEST(WidthBoundCheck, UniversalInstances) {
  for (int n : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto rho = random_state(2, seed), sigma = random_state(2, seed + 40);
      const auto iso = isotypic_pvm(n, 2);
      const auto m = universal_pvm(iso, rho);
      const auto rep = check_theorem2_instance(iso.pvm, m.pvm, tensor_power(sigma, n), tensor_power(rho, n),
                                               iso.irreducible_width());
      EXPECT_TRUE(rep.hypotheses_hold) << n << " " << seed;
      EXPECT_TRUE(rep.passed()) << n << " " << seed;
      EXPECT_EQ(rep.width, static_cast<std::uint64_t>(n + 1));
      EXPECT_LE(rep.exact - rep.measured, std::log(n + 1.0) + 1e-8);
    }
  }
}

TEST(WidthBoundCheck, HypothesisFailureIsFlagged) {
  const auto sigma = diagonal_state({0.8, 0.2});
  const auto rho = diagonal_state({0.4, 0.6});
  const auto e = Pvm::from_basis(hadamard(), "h");
  const auto rep = check_theorem2_instance(e, e, sigma, rho);
  EXPECT_GT(rep.sigma_commutator, 1e-8);
  EXPECT_FALSE(rep.hypotheses_hold);
  EXPECT_FALSE(rep.passed());
  // the inequalities are evaluated regardless and are reported separately
  EXPECT_TRUE(rep.lower_holds);
}
