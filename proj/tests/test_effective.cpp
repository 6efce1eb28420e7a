#include "shellmech/effective.hpp"
#include "shellmech/analysis.hpp"
#include "shellmech/generators.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace shellmech;

namespace {

MacroStrain random_strain(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MacroStrain m;
  for (int i = 0; i < 3; ++i) {
    m.e(i) = u(rng);
    m.chi(i) = u(rng);
  }
  return m;
}

// Largest principal angle between two subspaces given by orthonormal bases.
double subspace_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b);
  const double cmin = svd.singularValues().minCoeff();
  return std::acos(std::clamp(cmin, -1.0, 1.0));
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

}  // namespace

TEST(SolveCorrection, ZeroLoading) {
  const ElongationSystem sys = assemble(generate_random(3, 3, 0.3, 1));
  const CorrectionSolve sol = solve_correction(sys, MacroStrain());
  EXPECT_EQ(sol.correction.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(sol.energy, 0.0);
}

TEST(SolveCorrection, FlatCellBendingCostsNothing) {
  const ElongationSystem sys = assemble(generate_flat(3, 3));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    MacroStrain m;
    m.chi = Eigen::Vector3d(u(rng), u(rng), u(rng));
    const CorrectionSolve sol = solve_correction(sys, m);
    EXPECT_EQ(sol.energy, 0.0);
  }
}

TEST(SolveCorrection, MatchesDenseBruteForce) {
  const UnitCell cell = generate_flat(2, 2);
  const ElongationSystem sys = assemble(cell);
  MacroStrain m;
  m.e = Eigen::Vector3d(1.0, 0.0, 0.0);
  const CorrectionSolve sol = solve_correction(sys, m);
  const double dense = oracle::oracle_energy(cell, m);
  EXPECT_NEAR(sol.energy, dense, 1e-10 * std::max(1.0, dense));
}

TEST(SolveCorrection, CorrectionIsTranslationFree) {
  const ElongationSystem sys = assemble(generate_random(4, 4, 0.3, 2));
  std::mt19937_64 rng(8);
  const CorrectionSolve sol = solve_correction(sys, random_strain(rng));
  for (int c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (int n = 0; n < sys.nodes; ++n) mean += sol.correction(3 * n + c);
    EXPECT_LE(std::abs(mean), 1e-10 * sol.correction.norm());
  }
}

TEST(EffectiveTensor, FlatCellBlocks) {
  for (const UnitCell& cell : {generate_flat(1, 1), generate_flat(4, 4)}) {
    const EffectiveTensor eff = effective_tensor(assemble(cell));
    EXPECT_EQ(eff.bending_block().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(eff.coupling_block().cwiseAbs().maxCoeff(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(eff.membrane_block());
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(EffectiveTensor, SymmetricPositiveSemidefinite) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const EffectiveTensor eff =
        effective_tensor(assemble(generate_random(4, 4, 0.3, seed)));
    EXPECT_LE((eff.a - eff.a.transpose()).norm(), 1e-12 * eff.a.norm());
    Eigen::SelfAdjointEigenSolver<Matrix6> eig(eff.a);
    EXPECT_GE(eig.eigenvalues().minCoeff(),
              -1e-10 * eig.eigenvalues().maxCoeff());
  }
}

// Superposition: the quadratic form reproduces individual minimizations.
TEST(EffectiveTensor, QuadraticFormMatchesDirectSolves) {
  const ElongationSystem sys = assemble(generate_random(4, 4, 0.3, 11));
  const EffectiveTensor eff = effective_tensor(sys);
  const PeriodicSolver solver(sys);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const MacroStrain m = random_strain(rng);
    const double quad = m.vec().dot(eff.a * m.vec());
    const double direct = solve_correction(sys, m, solver).energy;
    EXPECT_NEAR(quad, direct, 1e-10 * std::max(1.0, std::abs(direct)));
  }
}

TEST(EffectiveTensor, AgreesWithOracle) {
  std::vector<UnitCell> cells = {generate_flat(2, 2),
                                 generate_corrugation(4, 2, 0.2)};
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    cells.push_back(generate_random(4, 4, 0.3, seed));
  for (const UnitCell& cell : cells) {
    const Matrix6 a = effective_tensor(assemble(cell)).a;
    const Matrix6 b = oracle::oracle_effective(cell);
    EXPECT_LE((a - b).norm(), 1e-8 * std::max(a.norm(), 1e-300))
        << (cell.metadata.count("seed") ? cell.metadata.at("seed")
                                        : std::string("-"));
  }
}

TEST(HillMandel, SelfPairingIsExact) {
  const ElongationSystem sys = assemble(generate_random(4, 4, 0.3, 13));
  const EffectiveTensor eff = effective_tensor(sys);
  std::mt19937_64 rng(10);
  const MacroStrain m = random_strain(rng);
  const double r = hill_mandel_check(sys, eff, m, m);
  EXPECT_LE(std::abs(r), 1e-10 * eff.a.norm() * m.norm() * m.norm());
}

TEST(HillMandel, RandomPairsBelowTolerance) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const ElongationSystem sys =
        assemble(generate_random(4, 4, 0.3, 100 + seed));
    const EffectiveTensor eff = effective_tensor(sys);
    std::mt19937_64 rng(11 + seed);
    for (int trial = 0; trial < 20; ++trial) {
      const MacroStrain m1 = random_strain(rng);
      const MacroStrain m2 = random_strain(rng);
      const double r = hill_mandel_check(sys, eff, m1, m2);
      EXPECT_LE(std::abs(r), 1e-10 * eff.a.norm() * m1.norm() * m2.norm());
    }
  }
}

// Stationarity makes the identity hold for any admissible correction of the
// second loading, not just the minimizer.
TEST(HillMandel, ArbitraryAdmissibleTestField) {
  const ElongationSystem sys = assemble(generate_random(3, 3, 0.3, 29));
  const EffectiveTensor eff = effective_tensor(sys);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const MacroStrain m1 = random_strain(rng);
    const MacroStrain m2 = random_strain(rng);
    Eigen::VectorXd d2(3 * sys.nodes);
    for (int i = 0; i < d2.size(); ++i) d2(i) = u(rng);
    const double r = hill_mandel_check(sys, eff, m1, m2, d2);
    EXPECT_LE(std::abs(r),
              1e-9 * std::max(1.0, eff.a.norm()) * m1.norm() *
                  (m2.norm() + d2.norm()));
  }
}

TEST(HillMandel, KernelModesCarryNoWork) {
  const ElongationSystem sys = assemble(generate_random(4, 4, 0.3, 41));
  const EffectiveTensor eff = effective_tensor(sys);
  const KernelReport report = kernel_count(eff.a);
  ASSERT_GT(report.kernel_dim, 0);
  std::mt19937_64 rng(13);
  const MacroStrain m1 = random_strain(rng);
  for (int k = 0; k < report.kernel_dim; ++k) {
    const MacroStrain mk = MacroStrain::from_vec(report.kernel_basis.col(k));
    const Eigen::VectorXd e1 = sys.elongations(m1, eff.corrections * m1.vec());
    const Eigen::VectorXd ek = sys.elongations(mk, eff.corrections * mk.vec());
    const double cross = e1.dot(sys.weights.asDiagonal() * ek) / sys.area;
    EXPECT_LE(std::abs(cross), 1e-8 * eff.a.norm() * m1.norm());
  }
}

// Scaling all elevations by s maps the kernel by (E, chi) -> (E, chi / s).
TEST(EffectiveTensor, KernelScaleCovariance) {
  const double s = 2.5;
  const UnitCell cell = generate_random(4, 4, 0.3, 51);
  UnitCell scaled = cell;
  for (Node& n : scaled.nodes) n.z *= s;
  detail::apply_stiffness_rule(scaled);

  const KernelReport ka = kernel_count_of(effective_tensor(assemble(cell)));
  const KernelReport kb = kernel_count(effective_tensor(assemble(scaled)).a);
  ASSERT_EQ(ka.kernel_dim, 3);
  ASSERT_EQ(kb.kernel_dim, 3);

  Eigen::MatrixXd mapped = ka.kernel_basis;
  mapped.bottomRows(3) /= s;
  EXPECT_LE(subspace_angle(orthonormalize(mapped), kb.kernel_basis), 1e-7);
}

// Random positive stiffness rescalings change A but not its kernel.
TEST(EffectiveTensor, KernelIsStiffnessIndependent) {
  const UnitCell cell = generate_random(4, 4, 0.3, 61);
  UnitCell rescaled = cell;
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (Bar& b : rescaled.bars) b.stiffness *= u(rng);

  const Matrix6 a = effective_tensor(assemble(cell)).a;
  const Matrix6 b = effective_tensor(assemble(rescaled)).a;
  EXPECT_GT((a - b).norm(), 1e-6 * a.norm());

  const KernelReport ka = kernel_count(a);
  const KernelReport kb = kernel_count(b);
  ASSERT_EQ(ka.kernel_dim, kb.kernel_dim);
  EXPECT_LE(subspace_angle(ka.kernel_basis, kb.kernel_basis), 1e-6);
}
