#include "test_support.hpp"

#include <sstream>

using namespace luinv;
using namespace luinv::testing;

TEST(Combine, NormalizesAgainstTolerance) {
  CheckResult a{.name = "a", .max_violation = 1e-13, .tolerance = 1e-12, .trials = 3};
  CheckResult b{.name = "b", .max_violation = 0.5, .tolerance = 1.0, .trials = 7};
  a.finalize();
  b.finalize();
  const auto c = combine("ab", {a, b});
  EXPECT_TRUE(c.passed);
  EXPECT_DOUBLE_EQ(c.max_violation, 0.5);
  EXPECT_EQ(c.trials, 7);
  CheckResult bad{.name = "bad", .max_violation = 2e-12, .tolerance = 1e-12};
  bad.finalize();
  EXPECT_FALSE(bad.passed);
  EXPECT_FALSE(combine("x", {a, bad}).passed);
}

TEST(Suites, AllPass) {
  for (const auto& r : run_suite("all", 5, Seed{2024}))
    EXPECT_TRUE(r.passed) << r.name << " violation " << r.max_violation << " tol " << r.tolerance;
  EXPECT_THROW(run_suite("nope", 5, Seed{1}), std::invalid_argument);
  EXPECT_THROW(run_suite("all", 0, Seed{1}), std::invalid_argument);
}

TEST(Controls, NonlocalUnitaryBreaksInvariance) {
  Rng rng(Seed{3});
  const auto psi = haar_random_pure(SubsystemDims{2, 2, 2}, rng);
  const auto r = check_nonlocal_control(psi, Path{0, 1, 2}, 20, rng);
  EXPECT_TRUE(r.passed) << r.max_violation;
  // Treating a global unitary as if it were local must fail the invariance check.
  const Matrix p = path_operator(psi, Path{0, 1, 2});
  const Matrix g = haar_random_unitary(8, rng);
  const Matrix q = path_operator(PureState::normalized(psi.dims(), g * psi.amp()), Path{0, 1, 2});
  EXPECT_GT(std::abs(p.trace() - q.trace()), tolerances::kNonlocalDeviation);
}

TEST(Controls, RealignOnly) {
  Rng rng(Seed{4});
  const auto psi = haar_random_pure(SubsystemDims{2, 3}, rng);
  const auto u = check_realign_only_unitary(psi, 0, 1, 30, rng);
  EXPECT_TRUE(u.passed) << u.max_violation;
  const auto o = check_realign_only_orthogonal(psi, 0, 1, 30, rng);
  EXPECT_TRUE(o.passed) << o.max_violation;
}

TEST(Covariance, AllSides) {
  Rng rng(Seed{5});
  const auto psi = haar_random_pure(SubsystemDims{3, 2, 2}, rng);
  for (auto side : {CovarianceSide::Left, CovarianceSide::Right, CovarianceSide::Both}) {
    const auto r = check_link_covariance(psi, 0, 1, side, 5, tolerances::kLinkCovariance, rng);
    EXPECT_TRUE(r.passed) << r.name << " " << r.max_violation;
  }
}

TEST(Identities, RectangularMixedMarginal) {
  Rng rng(Seed{6});
  const auto rho = reduced_density(haar_random_pure(SubsystemDims{3, 5, 2}, rng), {0, 1});
  EXPECT_TRUE(check_srs(rho, 0, 1).passed);
  EXPECT_TRUE(check_srs(rho, 1, 0).passed);
  EXPECT_TRUE(check_adjoint(rho, 0, 1).passed);
  const DensityMatrix flat(SubsystemDims{2, 3}, Matrix::Identity(6, 6) / 6.0);
  EXPECT_EQ(check_srs(flat, 0, 1).max_violation, 0.0);
  EXPECT_EQ(check_adjoint(flat, 0, 1).max_violation, 0.0);
}

TEST(Retracing, RejectsNonRetracingPath) {
  const auto psi = haar_random_pure(SubsystemDims{2, 2, 2}, Seed{7});
  EXPECT_THROW(check_retracing_positivity(psi, Path{0, 1, 2}), std::invalid_argument);
  EXPECT_TRUE(check_retracing_positivity(psi, Path{0, 1, 2, 1}).passed);
}

TEST(Retracing, NonRetracingLoopCanHaveComplexEigenvalues) {
  Rng rng(Seed{8});
  bool saw_complex = false;
  for (int t = 0; t < 20 && !saw_complex; ++t) {
    const auto psi = haar_random_pure(SubsystemDims{3, 3, 3}, rng);
    for (const Complex& z : spectrum(path_operator(psi, Path{0, 1, 2})))
      saw_complex |= std::abs(z.imag()) > 1e-6;
  }
  EXPECT_TRUE(saw_complex);
}

TEST(Separable, Checks) {
  Rng rng(Seed{9});
  const auto bi = separable_spectra_check(Separability::Bi, SubsystemDims{2, 3, 2}, 5, rng);
  EXPECT_TRUE(bi.passed) << bi.max_violation;
  const auto tri = separable_spectra_check(Separability::Tri, SubsystemDims{4, 4, 4}, 3, rng);
  EXPECT_TRUE(tri.passed) << tri.max_violation;
  EXPECT_THROW(separable_spectra_check(Separability::Tri, SubsystemDims{2, 2}, 1, rng), std::invalid_argument);
}

TEST(Separable, PtCubeTraceOracle) {
  // Bell pair: PT spectrum {1/2, 1/2, 1/2, -1/2}.
  EXPECT_NEAR(pt_cube_trace(pure_to_density(bell_state())), 0.25, 1e-15);
  EXPECT_NEAR(pt_cube_trace(pure_to_density(basis_state(SubsystemDims{2, 2}, {0, 1}))), 1.0, 1e-15);
}

TEST(Separable, BiLoopSpectrumOracle) {
  Matrix r = Matrix::Zero(2, 2);
  r.diagonal() << 0.75, 0.25;
  const auto eig = bi_separable_loop4_spectrum(DensityMatrix(SubsystemDims{2}, r));
  const std::vector<Complex> expected{0.75 * 0.75 * 0.75 * 0.75, 0.75 * 0.25 * 0.75 * 0.25,
                                      0.75 * 0.25 * 0.75 * 0.25, 0.25 * 0.25 * 0.25 * 0.25};
  EXPECT_LE(spectrum_distance(eig, expected), 1e-16);
}

TEST(Survey, DeterministicAcrossThreadCounts) {
  const SubsystemDims dims{2, 3, 2};
  const auto a = spectral_survey(dims, 6, Seed{11}, 1);
  const auto b = spectral_survey(dims, 6, Seed{11}, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].sample_index, k);
    EXPECT_EQ(a[k].eigenvalues, b[k].eigenvalues);
  }
}

TEST(Survey, CsvFormat) {
  const auto rec = spectral_survey(SubsystemDims{2, 2, 2}, 2, Seed{12}, 1);
  std::ostringstream out;
  write_survey_csv(out, rec);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "sample_index,k,re,im");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
  }
  EXPECT_EQ(rows, 2 * 4);
}

TEST(Survey, SummaryAndChecks) {
  const SubsystemDims dims{2, 2, 3};
  const Seed seed{13};
  const auto rec = spectral_survey(dims, 40, seed, 1);
  const auto s = summarize_survey(dims, seed, rec);
  EXPECT_EQ(s.samples, 40u);
  EXPECT_EQ(s.failures, 0u);
  EXPECT_DOUBLE_EQ(s.predicted_diag, 0.25);
  EXPECT_DOUBLE_EQ(s.predicted_offdiag, 0.25 / std::sqrt(3.0));
  EXPECT_TRUE(check_dominant_real(rec).passed);
  for (const auto& r : rec) {
    // trace of rho_21 diag sums to one, so the mean |diag| is exactly 1/(d1 d2).
    EXPECT_NEAR(r.mean_abs_diag, 0.25, 1e-14);
  }
  const auto j = to_json(s);
  EXPECT_EQ(j["samples"], 40);
  EXPECT_THROW(spectral_survey(SubsystemDims{2, 2}, 1, seed), std::invalid_argument);
}
