#pragma once

// Periodic triangulated shell unit cells: lattice, nodes, bars, validation.
//
// A cell stores node positions in the base copy of the fundamental domain;
// all periodicity is carried by integer bar shifts. A bar (i, j, shift)
// connects node i in the base copy to the copy of node j translated by
// shift(0)*a1 + shift(1)*a2.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace shellmech {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Shift = Eigen::Vector2i;

class CellError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Lattice {
  Vec2 a1{1.0, 0.0};
  Vec2 a2{0.0, 1.0};

  // Signed area of the cell; positive for counterclockwise (a1, a2).
  double area() const { return a1.x() * a2.y() - a1.y() * a2.x(); }

  Vec2 translation(const Shift& s) const {
    return static_cast<double>(s.x()) * a1 + static_cast<double>(s.y()) * a2;
  }
};

struct Node {
  Vec2 x{0.0, 0.0};  // planar position inside the fundamental domain
  double z = 0.0;    // elevation
};

struct Bar {
  int i = 0;
  int j = 0;
  Shift shift{0, 0};       // lattice wrap applied to endpoint j
  double stiffness = 1.0;  // axial stiffness, force per unit elongation
};

// Canonical key for duplicate detection: (i,j,shift) ~ (j,i,-shift).
inline std::tuple<int, int, int, int> bar_key(const Bar& b) {
  const bool flip = b.j < b.i || (b.i == b.j && (b.shift.x() < 0 ||
                                  (b.shift.x() == 0 && b.shift.y() < 0)));
  if (flip) return {b.j, b.i, -b.shift.x(), -b.shift.y()};
  return {b.i, b.j, b.shift.x(), b.shift.y()};
}

struct UnitCell {
  Lattice lattice;
  std::vector<Node> nodes;
  std::vector<Bar> bars;
  std::map<std::string, std::string> metadata;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_bars() const { return static_cast<int>(bars.size()); }

  // 3D embedding of node n translated by an integer lattice shift.
  Vec3 position(int n, const Shift& s = Shift::Zero()) const {
    const Vec2 p = nodes[n].x + lattice.translation(s);
    return {p.x(), p.y(), nodes[n].z};
  }

  Vec3 bar_vector(const Bar& b) const {
    return position(b.j, b.shift) - position(b.i);
  }

  double bar_length(const Bar& b) const { return bar_vector(b).norm(); }

  // Shortest admissible bar length.
  double min_length() const {
    return 1e-9 * std::max(lattice.a1.norm(), lattice.a2.norm());
  }
};

struct Validation {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

namespace detail {

// True when the cell's bar graph, tiled over the whole plane, is connected.
// Requires (a) the quotient graph to be connected and (b) the subgroup of
// lattice translations generated by cycle defects to be all of Z^2. The
// subgroup test uses the gcd of all 2x2 minors of the defect vectors, which
// equals the index of the generated sublattice.
inline bool tiled_graph_connected(const UnitCell& cell) {
  const int n = cell.num_nodes();
  if (n == 0) return false;

  std::vector<std::vector<std::pair<int, Shift>>> adj(n);
  for (const Bar& b : cell.bars) {
    adj[b.i].push_back({b.j, b.shift});
    adj[b.j].push_back({b.i, -b.shift});
  }

  std::vector<char> seen(n, 0);
  std::vector<Shift> pot(n, Shift::Zero());
  std::vector<Shift> defects;
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const auto& [v, s] : adj[u]) {
      const Shift q = pot[u] + s;
      if (!seen[v]) {
        seen[v] = 1;
        pot[v] = q;
        stack.push_back(v);
      } else if (q != pot[v]) {
        defects.push_back(q - pot[v]);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) return false;

  long long g = 0;
  for (std::size_t p = 0; p + 1 < defects.size(); ++p) {
    for (std::size_t q = p + 1; q < defects.size(); ++q) {
      const long long det =
          static_cast<long long>(defects[p].x()) * defects[q].y() -
          static_cast<long long>(defects[p].y()) * defects[q].x();
      g = std::gcd(g, std::llabs(det));
      if (g == 1) return true;
    }
  }
  return g == 1;
}

}  // namespace detail

// Checks every cell invariant. Errors are fatal (the cell is unusable);
// warnings flag suspicious but workable geometry (degree < 3).
inline Validation validate(const UnitCell& cell) {
  Validation v;
  const double area = cell.lattice.area();
  const double scale = std::max(cell.lattice.a1.norm(), cell.lattice.a2.norm());
  if (!(std::abs(area) > 1e-12 * scale * scale)) {
    v.errors.push_back("degenerate lattice");
    return v;
  }
  if (area < 0.0) {
    v.errors.push_back("lattice orientation not counterclockwise");
    return v;
  }
  if (cell.nodes.empty()) {
    v.errors.push_back("cell has no nodes");
    return v;
  }

  // Fundamental-domain membership: x = s*a1 + t*a2 with s, t in [0, 1).
  Eigen::Matrix2d basis;
  basis.col(0) = cell.lattice.a1;
  basis.col(1) = cell.lattice.a2;
  const Eigen::Matrix2d inv = basis.inverse();
  for (int n = 0; n < cell.num_nodes(); ++n) {
    const Vec2 st = inv * cell.nodes[n].x;
    if (st.x() < -1e-12 || st.x() > 1.0 - 1e-12 || st.y() < -1e-12 ||
        st.y() > 1.0 - 1e-12) {
      v.errors.push_back("node " + std::to_string(n) +
                         " outside fundamental domain");
      return v;
    }
  }

  std::set<std::tuple<int, int, int, int>> keys;
  std::vector<int> degree(cell.nodes.size(), 0);
  const double eps_len = cell.min_length();
  for (std::size_t b = 0; b < cell.bars.size(); ++b) {
    const Bar& bar = cell.bars[b];
    if (bar.i < 0 || bar.i >= cell.num_nodes() || bar.j < 0 ||
        bar.j >= cell.num_nodes()) {
      v.errors.push_back("bar " + std::to_string(b) + " index out of range");
      return v;
    }
    if (bar.i == bar.j && bar.shift == Shift::Zero()) {
      v.errors.push_back("degenerate bar (self loop)");
      return v;
    }
    if (!(bar.stiffness > 0.0)) {
      v.errors.push_back("nonpositive bar stiffness");
      return v;
    }
    if (!(cell.bar_length(bar) > eps_len)) {
      v.errors.push_back("bar " + std::to_string(b) +
                         " shorter than minimum length");
      return v;
    }
    if (!keys.insert(bar_key(bar)).second) {
      v.errors.push_back("duplicate bar");
      return v;
    }
    degree[bar.i]++;
    degree[bar.j]++;
  }

  for (int n = 0; n < cell.num_nodes(); ++n) {
    if (degree[n] == 0) {
      v.errors.push_back("isolated node " + std::to_string(n));
      return v;
    }
  }
  if (!detail::tiled_graph_connected(cell)) {
    v.errors.push_back("cell disconnected");
    return v;
  }
  for (int n = 0; n < cell.num_nodes(); ++n) {
    if (degree[n] < 3) {
      v.warnings.push_back("node " + std::to_string(n) + " has degree " +
                           std::to_string(degree[n]) + " < 3");
    }
  }
  return v;
}

inline void validate_or_throw(const UnitCell& cell) {
  const Validation v = validate(cell);
  if (!v.ok()) throw CellError(v.errors.front());
}

}  // namespace shellmech
