#pragma once

// Spectral analysis of the effective tensor: kernel extraction and the
// algebraic identities the kernel obeys on simply connected cells.
//
// In the orthonormal encoding the 2x2 cofactor map is the involution
//   C = [[0,1,0],[1,0,0],[0,0,-1]],     C vec(S) = vec(cof S),
// and the block matrix J = [[0,-C],[C,0]] maps isometric strain pairs to
// admissible stress pairs. J^2 = -I and J^T = -J.

#include "shellmech/effective.hpp"
#include "shellmech/macro.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace shellmech {

inline Eigen::Matrix3d cofactor_map() {
  Eigen::Matrix3d c;
  c << 0, 1, 0, 1, 0, 0, 0, 0, -1;
  return c;
}

inline Matrix6 symplectic_j() {
  const Eigen::Matrix3d c = cofactor_map();
  Matrix6 j = Matrix6::Zero();
  j.topRightCorner<3, 3>() = -c;
  j.bottomLeftCorner<3, 3>() = c;
  return j;
}

// E1 : cof chi2 - chi1 : cof E2, evaluated exactly in the encoding.
inline double symplectic_pairing(const MacroStrain& m1, const MacroStrain& m2) {
  const Eigen::Matrix3d c = cofactor_map();
  return m1.e.dot(c * m2.chi) - m1.chi.dot(c * m2.e);
}

// || A J A ||_F / || A ||_F^2, zero for A = 0.
inline double exact_relation_residual(const Matrix6& a) {
  const double na = a.norm();
  if (na == 0.0) return 0.0;
  return (a * symplectic_j() * a).norm() / (na * na);
}

struct KernelReport {
  Vector6 eigenvalues = Vector6::Zero();  // ascending
  int kernel_dim = 0;
  Eigen::MatrixXd kernel_basis;  // 6 x kernel_dim, orthonormal columns
  double gap_ratio = std::numeric_limits<double>::infinity();
  int pure_membrane_dim = 0;
  int pure_flexure_dim = 0;
  int mixed_dim = 0;
  double residual_aja = 0.0;
  double symplectic_residual = 0.0;
  Eigen::MatrixXd pairings;  // kernel_dim x kernel_dim, antisymmetric
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const {
    for (const auto& g : flags)
      if (g == f) return true;
    return false;
  }
};

// Kernel of A by eigenvalue threshold relative to the largest eigenvalue,
// with the spectral gap across the cut reported as a confidence diagnostic.
// `scale` is the cell's stiffness scale (EffectiveTensor::loading_scale):
// a tensor whose whole spectrum sits at rounding distance of zero relative
// to that scale is degenerate and its kernel is everything.
inline KernelReport kernel_count(const Matrix6& a, double tol_rel = 1e-8,
                                 double scale = 0.0) {
  KernelReport report;
  Eigen::SelfAdjointEigenSolver<Matrix6> eig(a);
  if (eig.info() != Eigen::Success)
    throw SolverError("kernel_count: eigendecomposition failed");
  report.eigenvalues = eig.eigenvalues();
  const double lmax = report.eigenvalues(5);
  if (!(lmax > 1e-14 * scale)) {
    report.kernel_dim = 6;
    report.kernel_basis = eig.eigenvectors();
    report.flags.push_back("degenerate cell");
    return report;
  }
  int k = 0;
  while (k < 6 && report.eigenvalues(k) < tol_rel * lmax) ++k;
  report.kernel_dim = k;
  report.kernel_basis = eig.eigenvectors().leftCols(k);
  if (k > 0 && k < 6) {
    const double below = report.eigenvalues(k - 1);
    report.gap_ratio = below > 0.0
                           ? report.eigenvalues(k) / below
                           : std::numeric_limits<double>::infinity();
    if (report.gap_ratio < 1e4) report.flags.push_back("ambiguous");
  }
  return report;
}

namespace detail {

// Dimension of the intersection of span(basis) with span(sub), counted as
// the number of principal angles below tol (radians).
inline int contained_dim(const Eigen::MatrixXd& basis,
                         const Eigen::MatrixXd& sub, double tol) {
  if (basis.cols() == 0 || sub.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.transpose() * sub);
  int dim = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    const double c = std::min(1.0, svd.singularValues()(i));
    if (std::acos(c) < tol) ++dim;
  }
  return dim;
}

// Kernel directions closest to span(sub): columns of the kernel basis rotated
// so the leading ones align with sub (principal vectors).
inline Eigen::MatrixXd principal_directions(const Eigen::MatrixXd& basis,
                                            const Eigen::MatrixXd& sub) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      basis.transpose() * sub, Eigen::ComputeFullU);
  return basis * svd.matrixU();
}

}  // namespace detail

struct Classification {
  int pure_membrane = 0;
  int pure_flexure = 0;
  int mixed = 0;
};

// Splits the kernel into pure membrane (chi = 0), pure flexure (E = 0) and
// mixed modes by principal angles against the coordinate subspaces.
inline Classification classify_kernel(KernelReport& report, double tol = 1e-6) {
  Eigen::MatrixXd se = Eigen::MatrixXd::Zero(6, 3);
  se.topRows(3).setIdentity();
  Eigen::MatrixXd sx = Eigen::MatrixXd::Zero(6, 3);
  sx.bottomRows(3).setIdentity();
  Classification c;
  c.pure_membrane = detail::contained_dim(report.kernel_basis, se, tol);
  c.pure_flexure = detail::contained_dim(report.kernel_basis, sx, tol);
  c.mixed = report.kernel_dim - c.pure_membrane - c.pure_flexure;
  report.pure_membrane_dim = c.pure_membrane;
  report.pure_flexure_dim = c.pure_flexure;
  report.mixed_dim = c.mixed;
  return c;
}

struct PoissonIdentity {
  bool canonical = false;
  double nu_membrane = std::numeric_limits<double>::quiet_NaN();
  double nu_flexure = std::numeric_limits<double>::quiet_NaN();
  // nu_membrane + nu_flexure when canonical; otherwise the largest kernel
  // pairing residual, the only part of the identity that remains testable.
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::string message;
};

// In- vs out-of-plane Poisson coefficients from the kernel: requires a unique
// pure membrane mode E ~ diag(1, -nu_m) and a diagonal pure flexure mode
// chi ~ diag(1, -nu_f). The pairing identity forces nu_m + nu_f = 0.
inline PoissonIdentity poisson_identity(const KernelReport& report,
                                        double tol = 1e-6) {
  PoissonIdentity out;
  const auto not_canonical = [&](const std::string& why) {
    out.canonical = false;
    out.message = "not in canonical form: " + why;
    double worst = 0.0;
    for (int p = 0; p < report.kernel_dim; ++p)
      for (int q = p + 1; q < report.kernel_dim; ++q)
        worst = std::max(worst, std::abs(symplectic_pairing(
                                    MacroStrain::from_vec(report.kernel_basis.col(p)),
                                    MacroStrain::from_vec(report.kernel_basis.col(q)))));
    out.residual = worst;
    return out;
  };

  if (report.pure_membrane_dim != 1)
    return not_canonical("no unique pure membrane mode");

  Eigen::MatrixXd se = Eigen::MatrixXd::Zero(6, 3);
  se.topRows(3).setIdentity();
  Eigen::MatrixXd sx = Eigen::MatrixXd::Zero(6, 3);
  sx.bottomRows(3).setIdentity();

  const Eigen::VectorXd vm =
      detail::principal_directions(report.kernel_basis, se).col(0);
  const Eigen::Vector3d e = vm.head<3>();
  if (std::abs(e(2)) > tol * e.norm())
    return not_canonical("membrane mode not diagonal");
  if (std::abs(e(0)) <= tol * e.norm())
    return not_canonical("membrane mode has no 11 component");
  out.nu_membrane = -e(1) / e(0);

  const int nf = report.pure_flexure_dim;
  if (nf < 1) return not_canonical("no pure flexure mode");
  const Eigen::MatrixXd wf =
      detail::principal_directions(report.kernel_basis, sx).leftCols(nf);
  // Combination with zero shear component and unit 11 component.
  Eigen::Vector3d chi = Eigen::Vector3d::Zero();
  bool found = false;
  if (nf == 1) {
    chi = wf.col(0).tail<3>();
    found = std::abs(chi(2)) <= tol * chi.norm();
  } else {
    // Shear-free direction within the flexure subspace.
    Eigen::MatrixXd shear(1, nf);
    for (int c = 0; c < nf; ++c) shear(0, c) = wf(5, c);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(shear, Eigen::ComputeFullV);
    for (int c = nf - 1; c >= 0 && !found; --c) {
      const Eigen::VectorXd cand = wf * svd.matrixV().col(c);
      if (std::abs(cand(5)) > tol * cand.norm()) continue;
      if (std::abs(cand(3)) > tol * cand.norm()) {
        chi = cand.tail<3>();
        found = true;
      }
    }
  }
  if (!found || std::abs(chi(0)) <= tol * chi.norm())
    return not_canonical("no diagonal pure flexure mode");
  out.nu_flexure = -chi(1) / chi(0);
  out.canonical = true;
  out.residual = out.nu_membrane + out.nu_flexure;
  return out;
}

// Full spectral report: kernel, classification, exact-relation residual and
// all pairwise kernel pairings.
inline KernelReport analyze_tensor(const Matrix6& a, double tol_rel = 1e-8,
                                   double class_tol = 1e-6,
                                   double scale = 0.0) {
  KernelReport report = kernel_count(a, tol_rel, scale);
  classify_kernel(report, class_tol);
  report.residual_aja = exact_relation_residual(a);
  const int k = report.kernel_dim;
  report.pairings.setZero(k, k);
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q)
      report.pairings(p, q) = symplectic_pairing(
          MacroStrain::from_vec(report.kernel_basis.col(p)),
          MacroStrain::from_vec(report.kernel_basis.col(q)));
  report.symplectic_residual =
      k > 0 ? report.pairings.cwiseAbs().maxCoeff() : 0.0;
  return report;
}

inline KernelReport kernel_count_of(const EffectiveTensor& eff,
                                    double tol_rel = 1e-8) {
  return kernel_count(eff.a, tol_rel, eff.loading_scale);
}

inline KernelReport analyze_tensor(const EffectiveTensor& eff,
                                   double tol_rel = 1e-8,
                                   double class_tol = 1e-6) {
  return analyze_tensor(eff.a, tol_rel, class_tol, eff.loading_scale);
}

}  // namespace shellmech
