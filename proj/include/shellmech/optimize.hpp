#pragma once

// Minimization of the effective membrane stiffness trace over nodal
// elevations. Planar positions and connectivity stay fixed; only z moves.

#include "shellmech/analysis.hpp"
#include "shellmech/assembly.hpp"
#include "shellmech/effective.hpp"
#include "shellmech/generators.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <vector>

namespace shellmech {

// Assembled system plus the three membrane unit-loading solves.
struct MembraneState {
  ElongationSystem sys;
  Eigen::Matrix3d a_ee = Eigen::Matrix3d::Zero();
  Eigen::MatrixXd corrections;  // 3N x 3
  double objective = 0.0;       // tr A_EE
};

inline MembraneState membrane_state(const UnitCell& cell) {
  MembraneState st;
  st.sys = assemble(cell);
  const PeriodicSolver solver(st.sys);
  const Eigen::MatrixXd em = st.sys.c_macro.leftCols(3);
  const Eigen::MatrixXd rhs =
      -st.sys.c_per.transpose() * (st.sys.weights.asDiagonal() * em);
  st.corrections = solver.solve(rhs);
  const Eigen::MatrixXd g = em + st.sys.c_per * st.corrections;
  st.a_ee = g.transpose() * (st.sys.weights.asDiagonal() * g) / st.sys.area;
  st.objective = st.a_ee.trace();
  return st;
}

inline double objective(const UnitCell& cell) {
  return membrane_state(cell).objective;
}

// Exact gradient of tr A_EE with respect to node elevations by the envelope
// theorem: at the solved corrections, each bar contributes
//   k e^2 = (g.v)^2 / |g|^3
// with v the (z-independent) total displacement difference of a membrane
// loading, so only the bar geometry g is differentiated.
inline Eigen::VectorXd elevation_gradient(const UnitCell& cell,
                                          const MembraneState& st) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(cell.num_nodes());
  for (int b = 0; b < cell.num_bars(); ++b) {
    const Bar& bar = cell.bars[b];
    const Vec3 g = cell.bar_vector(bar);
    const double len = g.norm();
    const double len3 = len * len * len;
    const double len5 = len3 * len * len;
    for (int p = 0; p < 3; ++p) {
      const Eigen::Matrix2d e =
          mandel_to_tensor(MacroStrain::unit(p).e);
      const Vec2 du = e * Vec2(g.x(), g.y());
      Vec3 v(du.x(), du.y(), 0.0);
      v += st.corrections.col(p).segment<3>(3 * bar.j);
      v -= st.corrections.col(p).segment<3>(3 * bar.i);
      const double gv = g.dot(v);
      const double dz = 2.0 * gv * v.z() / len3 - 3.0 * gv * gv * g.z() / len5;
      grad(bar.j) += dz;
      grad(bar.i) -= dz;
    }
  }
  return grad / cell.lattice.area();
}

inline Eigen::VectorXd elevation_gradient(const UnitCell& cell) {
  return elevation_gradient(cell, membrane_state(cell));
}

enum class StepRule {
  kBarzilaiBorwein,  // spectral trial step, backtracked to monotone descent
  kDoubling,         // previous accepted step doubled
};

struct TracePoint {
  int iter = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  double max_dz = 0.0;
};

struct MinimizeOptions {
  int iterations = 1000;
  StepRule step_rule = StepRule::kBarzilaiBorwein;
  double initial_step = 1.0;
  double armijo = 1e-4;
  int max_halvings = 60;
  std::optional<double> bound;  // box constraint |z - z0| <= bound
  std::uint64_t seed = 0;       // recorded for provenance only
  // Converged once the objective falls below this fraction of its initial
  // value; double precision has nothing left to resolve past that point.
  double converge_rel = 1e-16;
  // Observer invoked after every accepted step.
  std::function<void(const UnitCell&, const TracePoint&)> on_accept;
};

struct OptimizationTrace {
  std::vector<TracePoint> iterates;
  UnitCell initial_cell;
  UnitCell final_cell;
  std::uint64_t seed = 0;
  bool stalled = false;
};

inline void write_trace_csv(const OptimizationTrace& trace,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CellError("cannot open " + path + " for writing");
  out << "iter,objective,grad_norm,step,max_dz\n";
  char buf[160];
  for (const TracePoint& p : trace.iterates) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", p.iter,
                  p.objective, p.grad_norm, p.step, p.max_dz);
    out << buf;
  }
}

namespace detail {

// Elevation updates keep the stiffness rule k = 1/L in force, matching the
// geometry coupling the gradient differentiates through.
inline void set_elevations(UnitCell& cell, const Eigen::VectorXd& z) {
  for (int n = 0; n < cell.num_nodes(); ++n) cell.nodes[n].z = z(n);
  apply_stiffness_rule(cell);
}

inline bool lengths_admissible(const UnitCell& cell) {
  const double eps = cell.min_length();
  for (const Bar& b : cell.bars)
    if (!(cell.bar_length(b) > eps)) return false;
  return true;
}

}  // namespace detail

// Projected gradient descent with a monotone Armijo backtracking line search.
// Steps that would collapse a bar below the minimum length are rejected like
// failed Armijo trials. Deterministic for fixed options.
inline std::pair<UnitCell, OptimizationTrace> minimize(
    const UnitCell& start, const MinimizeOptions& opt = {}) {
  if (opt.iterations < 1) throw CellError("minimize: iterations must be >= 1");
  validate_or_throw(start);

  OptimizationTrace trace;
  trace.initial_cell = start;
  trace.seed = opt.seed;

  UnitCell cell = start;
  detail::apply_stiffness_rule(cell);
  const int n = cell.num_nodes();
  Eigen::VectorXd z0(n), z(n);
  for (int i = 0; i < n; ++i) z0(i) = z(i) = cell.nodes[i].z;

  MembraneState st = membrane_state(cell);
  Eigen::VectorXd grad = elevation_gradient(cell, st);
  trace.iterates.push_back({0, st.objective, grad.norm(), 0.0,
                            (z - z0).cwiseAbs().maxCoeff()});

  const auto clamp_to_box = [&](Eigen::VectorXd zc) {
    if (opt.bound) {
      const double r = *opt.bound;
      for (int i = 0; i < zc.size(); ++i)
        zc(i) = std::clamp(zc(i), z0(i) - r, z0(i) + r);
    }
    return zc;
  };

  const double floor = opt.converge_rel * st.objective;
  double step = opt.initial_step;
  Eigen::VectorXd prev_z, prev_grad;
  for (int iter = 1; iter <= opt.iterations; ++iter) {
    if (st.objective <= floor) break;  // converged to the precision floor
    const double gnorm = grad.norm();
    if (!(gnorm > 0.0)) break;  // stationary point

    double trial = step;
    if (opt.step_rule == StepRule::kBarzilaiBorwein && iter > 1) {
      const Eigen::VectorXd s = z - prev_z;
      const Eigen::VectorXd y = grad - prev_grad;
      const double sy = s.dot(y);
      if (sy > 0.0) trial = s.squaredNorm() / sy;
    }
    if (!(trial > 1e-300) || !std::isfinite(trial)) trial = step;

    bool accepted = false;
    UnitCell cand = cell;
    Eigen::VectorXd z_new;
    MembraneState st_new;
    for (int h = 0; h <= opt.max_halvings; ++h) {
      z_new = clamp_to_box(z - trial * grad);
      const double decrease = grad.dot(z - z_new);
      if (decrease <= 0.0) {  // projection removed the whole step
        trial *= 0.5;
        continue;
      }
      detail::set_elevations(cand, z_new);
      if (!detail::lengths_admissible(cand)) {
        trial *= 0.5;
        continue;
      }
      st_new = membrane_state(cand);
      if (st_new.objective <= st.objective - opt.armijo * decrease) {
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) {
      trace.stalled = true;
      break;
    }

    prev_z = z;
    prev_grad = grad;
    z = z_new;
    cell = cand;
    st = st_new;
    grad = elevation_gradient(cell, st);
    step = opt.step_rule == StepRule::kDoubling ? 2.0 * trial : trial;
    trace.iterates.push_back({iter, st.objective, grad.norm(), trial,
                              (z - z0).cwiseAbs().maxCoeff()});
    if (opt.on_accept) opt.on_accept(cell, trace.iterates.back());
  }

  trace.final_cell = cell;
  return {cell, trace};
}

}  // namespace shellmech
