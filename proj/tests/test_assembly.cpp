#include "shellmech/assembly.hpp"
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

}  // namespace

TEST(MacroStrain, MandelEncodingIsOrthonormal) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Matrix2d s, t;
    const double s12 = u(rng), t12 = u(rng);
    s << u(rng), s12, s12, u(rng);
    t << u(rng), t12, t12, u(rng);
    const double frobenius = (s.array() * t.array()).sum();
    EXPECT_NEAR(tensor_to_mandel(s).dot(tensor_to_mandel(t)), frobenius, 1e-14);
    EXPECT_TRUE(mandel_to_tensor(tensor_to_mandel(s)).isApprox(s, 1e-15));
  }
}

TEST(MacroDisplacement, ZeroStrainZeroDisplacement) {
  const MacroStrain zero;
  EXPECT_EQ(macro_displacement(Vec3(0.3, -1.2, 0.7), zero), Vec3(0, 0, 0));
}

TEST(MacroDisplacement, UniformDilation) {
  MacroStrain m;
  m.e = Eigen::Vector3d(1.0, 1.0, 0.0);  // E = identity
  const Vec3 p(0.4, -0.7, 0.3);
  const Vec3 d = macro_displacement(p, m);
  EXPECT_NEAR(d.x(), p.x(), 1e-15);
  EXPECT_NEAR(d.y(), p.y(), 1e-15);
  EXPECT_EQ(d.z(), 0.0);
}

TEST(MacroDisplacement, PureBendingAnsatz) {
  MacroStrain m;
  m.chi = Eigen::Vector3d(1.0, 0.0, 0.0);  // chi = diag(1, 0)
  const Vec3 p(0.8, -0.4, 0.25);
  const Vec3 d = macro_displacement(p, m);
  EXPECT_NEAR(d.x(), p.z() * p.x(), 1e-15);   // u1 = z x1
  EXPECT_EQ(d.y(), 0.0);
  EXPECT_NEAR(d.z(), -0.5 * p.x() * p.x(), 1e-15);  // w = -x1^2/2
}

TEST(BarElongationRow, AxialStretchOfUnitBar) {
  const UnitCell cell = generate_flat(1, 1);
  // Bar with shift (1,0) lies along the x-axis with unit length.
  for (const Bar& b : cell.bars) {
    if (b.shift != Shift(1, 0)) continue;
    const ElongationRow row = bar_elongation_row(cell, b);
    MacroStrain m;
    m.e = Eigen::Vector3d(1.0, 0.0, 0.0);
    EXPECT_NEAR(row.macro.dot(m.vec()), 1.0, 1e-14);
  }
}

TEST(BarElongationRow, ZeroStrainGivesZero) {
  const UnitCell cell = generate_random(3, 3, 0.2, 5);
  for (const Bar& b : cell.bars) {
    const ElongationRow row = bar_elongation_row(cell, b);
    EXPECT_EQ(row.macro.dot(MacroStrain().vec()), 0.0);
  }
}

// In-plane bars see no first-order elongation from any bending strain.
TEST(Assemble, FlatCellBendingColumnsVanish) {
  for (const UnitCell& cell : {generate_flat(1, 1), generate_flat(3, 2)}) {
    const ElongationSystem sys = assemble(cell);
    EXPECT_EQ(sys.c_macro.rightCols(3).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Assemble, PeriodicRowsHaveAtMostSixEntries) {
  const UnitCell cell = generate_random(4, 4, 0.3, 9);
  const ElongationSystem sys = assemble(cell);
  for (int b = 0; b < sys.bars(); ++b) {
    int nz = 0;
    for (int c = 0; c < sys.c_per.cols(); ++c)
      if (sys.c_per(b, c) != 0.0) ++nz;
    EXPECT_LE(nz, 6);
  }
}

TEST(Assemble, TranslationsAreInThePeriodicNullSpace) {
  for (const UnitCell& cell :
       {generate_flat(2, 2), generate_random(4, 4, 0.3, 3)}) {
    const ElongationSystem sys = assemble(cell);
    const int nn = sys.nodes;
    for (int c = 0; c < 3; ++c) {
      Eigen::VectorXd t = Eigen::VectorXd::Zero(3 * nn);
      for (int n = 0; n < nn; ++n) t(3 * n + c) = 1.0;
      EXPECT_LE((sys.c_per * t).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

// Dense rank oracle. A generic elevated cell has only the three translations
// in its periodic null space: rank = 3N - 3. A flat cell also has every
// per-node out-of-plane wiggle (the z columns vanish identically), so its
// rank drops to 2N - 2.
TEST(Assemble, PeriodicRankByDenseOracle) {
  const ElongationSystem flat = assemble(generate_flat(2, 2));
  for (int n = 0; n < flat.nodes; ++n)
    EXPECT_EQ(flat.c_per.col(3 * n + 2).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(oracle::dense_rank(flat.c_per), 2 * flat.nodes - 2);

  const ElongationSystem generic = assemble(generate_random(4, 4, 0.3, 3));
  EXPECT_EQ(oracle::dense_rank(generic.c_per), 3 * generic.nodes - 3);
}

TEST(Assemble, ElongationsAreExactlyLinear) {
  const UnitCell cell = generate_random(3, 3, 0.25, 17);
  const ElongationSystem sys = assemble(cell);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const MacroStrain m1 = random_strain(rng);
    const MacroStrain m2 = random_strain(rng);
    Eigen::VectorXd d1(3 * sys.nodes), d2(3 * sys.nodes);
    for (int i = 0; i < d1.size(); ++i) {
      d1(i) = u(rng);
      d2(i) = u(rng);
    }
    const double a = u(rng), b = u(rng);
    const MacroStrain mc = MacroStrain::from_vec(a * m1.vec() + b * m2.vec());
    const Eigen::VectorXd lhs = sys.elongations(mc, a * d1 + b * d2);
    const Eigen::VectorXd rhs =
        a * sys.elongations(m1, d1) + b * sys.elongations(m2, d2);
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Assemble, TranslationInvarianceOfElongations) {
  const UnitCell cell = generate_random(3, 4, 0.3, 23);
  const ElongationSystem sys = assemble(cell);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const MacroStrain m = random_strain(rng);
  Eigen::VectorXd d(3 * sys.nodes);
  for (int i = 0; i < d.size(); ++i) d(i) = u(rng);
  Eigen::VectorXd shifted = d;
  const Vec3 t(u(rng), u(rng), u(rng));
  for (int n = 0; n < sys.nodes; ++n) shifted.segment<3>(3 * n) += t;
  EXPECT_LE(
      (sys.elongations(m, d) - sys.elongations(m, shifted)).cwiseAbs().maxCoeff(),
      1e-13);
}

// Renumbering nodes permutes the periodic columns and nothing else.
TEST(Assemble, PermutationEquivariance) {
  const UnitCell cell = generate_random(3, 3, 0.3, 31);
  const int nn = cell.num_nodes();
  std::vector<int> perm(nn);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(4);
  std::shuffle(perm.begin(), perm.end(), rng);

  UnitCell shuffled = cell;
  for (int n = 0; n < nn; ++n) shuffled.nodes[perm[n]] = cell.nodes[n];
  for (int b = 0; b < cell.num_bars(); ++b) {
    shuffled.bars[b].i = perm[cell.bars[b].i];
    shuffled.bars[b].j = perm[cell.bars[b].j];
  }

  const ElongationSystem sa = assemble(cell);
  const ElongationSystem sb = assemble(shuffled);
  EXPECT_LE((sa.c_macro - sb.c_macro).cwiseAbs().maxCoeff(), 0.0);
  for (int b = 0; b < sa.bars(); ++b)
    for (int n = 0; n < nn; ++n)
      for (int c = 0; c < 3; ++c)
        EXPECT_EQ(sa.c_per(b, 3 * n + c), sb.c_per(b, 3 * perm[n] + c));
  EXPECT_EQ(sa.weights, sb.weights);
}
