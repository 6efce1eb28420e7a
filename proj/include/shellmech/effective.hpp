#pragma once

// Effective 6x6 stiffness tensor by strain-energy minimization over periodic
// corrections. The six unit-loading solves share one factorization; the
// three uniform translations are the only gauge freedom and are deflated.

#include "shellmech/assembly.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace shellmech {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pseudoinverse of the correction stiffness K = C_per^T W C_per via symmetric
// eigendecomposition; eigenvalues below rel_cutoff * lambda_max are treated
// as zero so cells with internal mechanisms still yield the minimum-norm,
// minimum-energy correction.
class PeriodicSolver {
 public:
  explicit PeriodicSolver(const ElongationSystem& sys,
                          double rel_cutoff = 1e-12) {
    const int dof = static_cast<int>(sys.c_per.cols());
    nodes_ = sys.nodes;
    const Eigen::MatrixXd wc = sys.weights.asDiagonal() * sys.c_per;
    const Eigen::MatrixXd k = sys.c_per.transpose() * wc;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
    if (eig.info() != Eigen::Success)
      throw SolverError("correction solve failed: eigendecomposition of the " +
                        std::to_string(dof) + "x" + std::to_string(dof) +
                        " normal matrix did not converge");
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const double lmax = lam.size() ? lam(lam.size() - 1) : 0.0;
    const double cutoff = rel_cutoff * std::max(lmax, 0.0);
    inv_lambda_.resize(lam.size());
    for (int i = 0; i < lam.size(); ++i)
      inv_lambda_(i) = lam(i) > cutoff ? 1.0 / lam(i) : 0.0;
    vectors_ = eig.eigenvectors();
  }

  // Minimum-norm solution of K d = rhs (rhs must be range-consistent, which
  // stationarity guarantees), with uniform translations projected out.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd d =
        vectors_ * (inv_lambda_.asDiagonal() * (vectors_.transpose() * rhs));
    deflate_translations(d);
    return d;
  }

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const {
    Eigen::MatrixXd d =
        vectors_ * (inv_lambda_.asDiagonal() * (vectors_.transpose() * rhs));
    for (int c = 0; c < d.cols(); ++c) {
      Eigen::VectorXd col = d.col(c);
      deflate_translations(col);
      d.col(c) = col;
    }
    return d;
  }

 private:
  void deflate_translations(Eigen::VectorXd& d) const {
    for (int c = 0; c < 3; ++c) {
      double mean = 0.0;
      for (int n = 0; n < nodes_; ++n) mean += d(3 * n + c);
      mean /= nodes_;
      for (int n = 0; n < nodes_; ++n) d(3 * n + c) -= mean;
    }
  }

  Eigen::MatrixXd vectors_;
  Eigen::VectorXd inv_lambda_;
  int nodes_ = 0;
};

struct CorrectionSolve {
  Eigen::VectorXd correction;  // 3N periodic correction, translation-free
  double energy = 0.0;         // attained minimum per unit cell area
};

inline CorrectionSolve solve_correction(const ElongationSystem& sys,
                                        const MacroStrain& m,
                                        const PeriodicSolver& solver) {
  const Eigen::VectorXd em = sys.c_macro * m.vec();
  const Eigen::VectorXd rhs =
      -sys.c_per.transpose() * (sys.weights.asDiagonal() * em);
  CorrectionSolve out;
  out.correction = solver.solve(rhs);
  const Eigen::VectorXd e = em + sys.c_per * out.correction;
  out.energy = e.dot(sys.weights.asDiagonal() * e) / sys.area;
  return out;
}

inline CorrectionSolve solve_correction(const ElongationSystem& sys,
                                        const MacroStrain& m) {
  return solve_correction(sys, m, PeriodicSolver(sys));
}

struct EffectiveTensor {
  Matrix6 a = Matrix6::Zero();     // energy density per unit cell area
  Eigen::MatrixXd corrections;     // 3N x 6, one column per unit loading
  double area = 0.0;
  // Largest eigenvalue of the zero-correction energy C_macro^T W C_macro /
  // area: the stiffness scale of the cell. A with norm at rounding distance
  // of zero relative to this scale is a degenerate (fully isometric) cell.
  double loading_scale = 0.0;

  Eigen::Matrix3d membrane_block() const { return a.topLeftCorner<3, 3>(); }
  Eigen::Matrix3d coupling_block() const { return a.topRightCorner<3, 3>(); }
  Eigen::Matrix3d bending_block() const { return a.bottomRightCorner<3, 3>(); }
};

inline EffectiveTensor effective_tensor(const ElongationSystem& sys,
                                        const PeriodicSolver& solver) {
  EffectiveTensor eff;
  eff.area = sys.area;
  const Eigen::MatrixXd rhs =
      -sys.c_per.transpose() * (sys.weights.asDiagonal() * sys.c_macro);
  eff.corrections = solver.solve(rhs);
  const Eigen::MatrixXd g = sys.c_macro + sys.c_per * eff.corrections;
  const Matrix6 a = g.transpose() * (sys.weights.asDiagonal() * g) / sys.area;
  eff.a = 0.5 * (a + a.transpose());
  const Matrix6 upper = sys.c_macro.transpose() *
                        (sys.weights.asDiagonal() * sys.c_macro) / sys.area;
  Eigen::SelfAdjointEigenSolver<Matrix6> bound(upper);
  eff.loading_scale = bound.eigenvalues().maxCoeff();
  return eff;
}

inline EffectiveTensor effective_tensor(const ElongationSystem& sys) {
  return effective_tensor(sys, PeriodicSolver(sys));
}

// Discrete Hill-Mandel cross-work consistency: the microscopic cross work of
// the stresses of loading m1 against the strains of loading m2 must equal the
// macroscopic pairing m2 . (A m1). The returned residual is the difference;
// d2 may be any admissible correction field, not just the minimizer, since
// stationarity of the m1 solve removes its influence.
inline double hill_mandel_check(const ElongationSystem& sys,
                                const EffectiveTensor& eff,
                                const MacroStrain& m1, const MacroStrain& m2,
                                const Eigen::VectorXd& d2) {
  const Eigen::VectorXd e1 = sys.elongations(m1, eff.corrections * m1.vec());
  const Eigen::VectorXd e2 = sys.elongations(m2, d2);
  const double cross = e1.dot(sys.weights.asDiagonal() * e2) / sys.area;
  const double macro = m2.vec().dot(eff.a * m1.vec());
  return cross - macro;
}

inline double hill_mandel_check(const ElongationSystem& sys,
                                const EffectiveTensor& eff,
                                const MacroStrain& m1, const MacroStrain& m2) {
  return hill_mandel_check(sys, eff, m1, m2, eff.corrections * m2.vec());
}

inline double hill_mandel_check(const ElongationSystem& sys,
                                const MacroStrain& m1, const MacroStrain& m2) {
  return hill_mandel_check(sys, effective_tensor(sys), m1, m2);
}

}  // namespace shellmech
