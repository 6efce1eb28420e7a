#pragma once

// Linearized elongation operator of the periodic truss under the macroscopic
// strain ansatz. For bar b with unit direction t, the elongation is
//   e_b = t . [ d(endpoint j at its shifted position) - d(endpoint i) ]
// where d = macroscopic displacement + periodic correction. Corrections of a
// wrapped endpoint are those of its base-cell node.

#include "shellmech/cell.hpp"
#include "shellmech/macro.hpp"

#include <Eigen/Dense>

namespace shellmech {

struct ElongationRow {
  Vector6 macro;  // elongation per unit macroscopic strain
  int i, j;       // periodic part: -t on node i, +t on node j
  Vec3 t;         // unit bar direction (undeformed shifted geometry)
};

inline ElongationRow bar_elongation_row(const UnitCell& cell, const Bar& bar) {
  const Vec3 pi = cell.position(bar.i);
  const Vec3 pj = cell.position(bar.j, bar.shift);
  const Vec3 g = pj - pi;
  const double len = g.norm();
  if (!(len > cell.min_length()))
    throw CellError("bar_elongation_row: degenerate bar");
  ElongationRow row;
  row.i = bar.i;
  row.j = bar.j;
  row.t = g / len;
  for (int p = 0; p < 6; ++p) {
    const MacroStrain m = MacroStrain::unit(p);
    row.macro(p) = row.t.dot(macro_displacement(pj, m) - macro_displacement(pi, m));
  }
  return row;
}

// Dense stacked elongation operator. Cells are desk-sized, so the periodic
// block is stored dense; each row still has at most 6 nonzero entries.
struct ElongationSystem {
  Eigen::MatrixXd c_macro;  // bars x 6
  Eigen::MatrixXd c_per;    // bars x 3N
  Eigen::VectorXd weights;  // bar stiffnesses
  double area = 0.0;
  int nodes = 0;

  int bars() const { return static_cast<int>(weights.size()); }

  // Elongations of all bars for loading m with periodic correction d.
  Eigen::VectorXd elongations(const MacroStrain& m,
                              const Eigen::VectorXd& d) const {
    return c_macro * m.vec() + c_per * d;
  }
};

inline ElongationSystem assemble(const UnitCell& cell) {
  validate_or_throw(cell);
  const int nb = cell.num_bars();
  const int nn = cell.num_nodes();
  ElongationSystem sys;
  sys.c_macro.setZero(nb, 6);
  sys.c_per.setZero(nb, 3 * nn);
  sys.weights.resize(nb);
  sys.area = cell.lattice.area();
  sys.nodes = nn;
  for (int b = 0; b < nb; ++b) {
    const ElongationRow row = bar_elongation_row(cell, cell.bars[b]);
    sys.c_macro.row(b) = row.macro.transpose();
    for (int c = 0; c < 3; ++c) {
      sys.c_per(b, 3 * row.j + c) += row.t(c);
      sys.c_per(b, 3 * row.i + c) -= row.t(c);
    }
    sys.weights(b) = cell.bars[b].stiffness;
  }
  return sys;
}

}  // namespace shellmech
