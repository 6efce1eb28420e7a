#pragma once

// Macroscopic strain pairs (E, chi) in the orthonormal (Mandel) 3-vector
// encoding vec(S) = (S11, S22, sqrt(2) S12), so vec(S).vec(T) = S:T exactly.

#include <Eigen/Dense>

#include <cmath>

namespace shellmech {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

inline Eigen::Matrix2d mandel_to_tensor(const Eigen::Vector3d& v) {
  const double s = v.z() / std::sqrt(2.0);
  Eigen::Matrix2d m;
  m << v.x(), s, s, v.y();
  return m;
}

inline Eigen::Vector3d tensor_to_mandel(const Eigen::Matrix2d& s) {
  return {s(0, 0), s(1, 1), std::sqrt(2.0) * 0.5 * (s(0, 1) + s(1, 0))};
}

struct MacroStrain {
  Eigen::Vector3d e = Eigen::Vector3d::Zero();    // membrane strain E
  Eigen::Vector3d chi = Eigen::Vector3d::Zero();  // bending strain chi

  Vector6 vec() const {
    Vector6 v;
    v << e, chi;
    return v;
  }
  static MacroStrain from_vec(const Vector6& v) {
    return {v.head<3>(), v.tail<3>()};
  }
  // p-th unit loading, p in [0, 6): three membrane then three bending.
  static MacroStrain unit(int p) {
    Vector6 v = Vector6::Zero();
    v(p) = 1.0;
    return from_vec(v);
  }
  Eigen::Matrix2d membrane() const { return mandel_to_tensor(e); }
  Eigen::Matrix2d bending() const { return mandel_to_tensor(chi); }
  double norm() const { return vec().norm(); }
};

// Displacement of a material point at 3D position p under the macroscopic
// ansatz: in-plane u = (E + z chi) x, out-of-plane w = -1/2 x . chi x.
inline Eigen::Vector3d macro_displacement(const Eigen::Vector3d& p,
                                          const MacroStrain& m) {
  const Eigen::Matrix2d e = m.membrane();
  const Eigen::Matrix2d chi = m.bending();
  const Eigen::Vector2d x = p.head<2>();
  const Eigen::Vector2d cx = chi * x;
  const Eigen::Vector2d u = e * x + p.z() * cx;
  return {u.x(), u.y(), -0.5 * x.dot(cx)};
}

}  // namespace shellmech
