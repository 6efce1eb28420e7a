#pragma once

// Parameterized unit-cell generators. All generators use the stiffness rule
// k = 1/L (unit modulus, unit section) and are deterministic for fixed
// parameters and seed.

#include "shellmech/cell.hpp"

#include <cstdint>
#include <random>
#include <sstream>

namespace shellmech {

namespace detail {

// Grid node (i, j) with integer wrap into the base copy.
struct GridRef {
  int node;
  Shift shift;
};

inline GridRef grid_ref(int i, int j, int nx, int ny) {
  const auto fdiv = [](int a, int n) {
    int q = a / n;
    if (a % n != 0 && ((a < 0) != (n < 0))) --q;
    return q;
  };
  const int wi = i - fdiv(i, nx) * nx;
  const int wj = j - fdiv(j, ny) * ny;
  return {wj * nx + wi, Shift(fdiv(i, nx), fdiv(j, ny))};
}

inline Bar make_bar(const GridRef& a, const GridRef& b) {
  Bar bar;
  bar.i = a.node;
  bar.j = b.node;
  bar.shift = b.shift - a.shift;
  return bar;
}

// Union-jack-free triangulation of an nx-by-ny torus grid: the diagonal
// direction alternates between the two halves of the cell, switching at the
// column i = nx/2. Every node keeps degree 6, and for even nx the pattern is
// mirror-symmetric about the column i = 0 (the corrugation crest).
inline void add_grid_bars(UnitCell& cell, int nx, int ny) {
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const GridRef n00 = grid_ref(i, j, nx, ny);
      const GridRef n10 = grid_ref(i + 1, j, nx, ny);
      const GridRef n01 = grid_ref(i, j + 1, nx, ny);
      const GridRef n11 = grid_ref(i + 1, j + 1, nx, ny);
      cell.bars.push_back(make_bar(n00, n10));
      cell.bars.push_back(make_bar(n00, n01));
      cell.bars.push_back(2 * i < nx ? make_bar(n00, n11)
                                     : make_bar(n10, n01));
    }
  }
}

inline void apply_stiffness_rule(UnitCell& cell) {
  for (Bar& b : cell.bars) b.stiffness = 1.0 / cell.bar_length(b);
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline UnitCell grid_cell(int nx, int ny) {
  UnitCell cell;
  cell.lattice.a1 = Vec2(static_cast<double>(nx), 0.0);
  cell.lattice.a2 = Vec2(0.0, static_cast<double>(ny));
  cell.nodes.resize(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      cell.nodes[static_cast<std::size_t>(j) * nx + i] = {
          Vec2(static_cast<double>(i), static_cast<double>(j)), 0.0};
  add_grid_bars(cell, nx, ny);
  return cell;
}

}  // namespace detail

// Flat nx-by-ny triangulated torus grid, unit spacing, z = 0.
inline UnitCell generate_flat(int nx, int ny) {
  if (nx < 1 || ny < 1) throw CellError("generate_flat: nx, ny must be >= 1");
  UnitCell cell = detail::grid_cell(nx, ny);
  detail::apply_stiffness_rule(cell);
  cell.metadata = {{"generator", "flat"},
                   {"nx", std::to_string(nx)},
                   {"ny", std::to_string(ny)}};
  validate_or_throw(cell);
  return cell;
}

// Singly corrugated cell: z(x1) = h cos(2 pi x1 / nx), independent of x2.
// The alternating-diagonal pattern is mirror-symmetric about the crest for
// even nx, which keeps the membrane/flexure mode split clean.
inline UnitCell generate_corrugation(int nx, int ny, double h) {
  if (nx < 2 || ny < 1)
    throw CellError("generate_corrugation: need nx >= 2, ny >= 1");
  if (h < 0.0) throw CellError("generate_corrugation: amplitude must be >= 0");
  UnitCell cell = detail::grid_cell(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      cell.nodes[static_cast<std::size_t>(j) * nx + i].z =
          h * std::cos(2.0 * M_PI * i / nx);
  detail::apply_stiffness_rule(cell);
  cell.metadata = {{"generator", "corrugation"},
                   {"nx", std::to_string(nx)},
                   {"ny", std::to_string(ny)},
                   {"h", detail::fmt(h)}};
  validate_or_throw(cell);
  return cell;
}

// Flat grid with iid elevations drawn uniformly from [-h, h]. Uses the
// mt19937_64 bit stream directly so results are identical across platforms.
inline UnitCell generate_random(int nx, int ny, double h, std::uint64_t seed) {
  if (nx < 2 || ny < 2)
    throw CellError("generate_random: need nx, ny >= 2");
  if (h < 0.0) throw CellError("generate_random: amplitude must be >= 0");
  UnitCell cell = detail::grid_cell(nx, ny);
  std::mt19937_64 rng(seed);
  for (Node& n : cell.nodes) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    n.z = h * (2.0 * u - 1.0);
  }
  detail::apply_stiffness_rule(cell);
  cell.metadata = {{"generator", "random"},
                   {"nx", std::to_string(nx)},
                   {"ny", std::to_string(ny)},
                   {"h", detail::fmt(h)},
                   {"seed", std::to_string(seed)}};
  validate_or_throw(cell);
  return cell;
}

// Removes the listed nodes and every incident bar; remaining indices are
// re-packed in order. Fails if the punched cell no longer tiles into a
// connected graph.
inline UnitCell punch_hole(const UnitCell& cell, const std::set<int>& node_ids) {
  if (node_ids.empty()) throw CellError("punch_hole: empty node set");
  for (int id : node_ids)
    if (id < 0 || id >= cell.num_nodes())
      throw CellError("punch_hole: node id out of range");
  if (static_cast<int>(node_ids.size()) >= cell.num_nodes())
    throw CellError("punch_hole: cannot remove every node");

  UnitCell out;
  out.lattice = cell.lattice;
  out.metadata = cell.metadata;
  std::vector<int> remap(cell.nodes.size(), -1);
  for (int n = 0; n < cell.num_nodes(); ++n) {
    if (node_ids.count(n)) continue;
    remap[n] = out.num_nodes();
    out.nodes.push_back(cell.nodes[n]);
  }
  for (const Bar& b : cell.bars) {
    if (remap[b.i] < 0 || remap[b.j] < 0) continue;
    Bar nb = b;
    nb.i = remap[b.i];
    nb.j = remap[b.j];
    out.bars.push_back(nb);
  }

  std::string hole;
  for (int id : node_ids) hole += (hole.empty() ? "" : ",") + std::to_string(id);
  out.metadata["hole_nodes"] = hole;
  out.metadata["generator"] =
      (cell.metadata.count("generator") ? cell.metadata.at("generator") : "?") +
      "+hole";

  const Validation v = validate(out);
  if (!v.ok()) {
    if (v.errors.front().find("disconnected") != std::string::npos ||
        v.errors.front().find("isolated") != std::string::npos)
      throw CellError("cell disconnected by hole");
    throw CellError(v.errors.front());
  }
  return out;
}

// Two parallel triangulated layers at z = 0 and z = gap, joined once per cell
// by a triangulated square tube of side `tube` through the grid square
// (0,0)-(1,1). The tiled surface has one handle per cell (per-cell Euler
// characteristic -2 under torus identification).
inline UnitCell generate_handle(int nx, int ny, double gap, double tube) {
  if (nx < 2 || ny < 2) throw CellError("generate_handle: need nx, ny >= 2");
  if (!(gap > 0.0)) throw CellError("generate_handle: gap must be > 0");
  if (!(tube > 0.0)) throw CellError("generate_handle: tube must be > 0");
  if (tube >= 1.0) throw CellError("generate_handle: tube size exceeds cell");

  const int n = nx * ny;
  UnitCell cell;
  cell.lattice.a1 = Vec2(static_cast<double>(nx), 0.0);
  cell.lattice.a2 = Vec2(0.0, static_cast<double>(ny));
  cell.nodes.resize(2 * static_cast<std::size_t>(n) + 8);
  for (int layer = 0; layer < 2; ++layer)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        cell.nodes[static_cast<std::size_t>(layer) * n + j * nx + i] = {
            Vec2(static_cast<double>(i), static_cast<double>(j)),
            layer == 0 ? 0.0 : gap};

  // Layer triangulations minus the diagonal of square (0,0).
  for (int layer = 0; layer < 2; ++layer) {
    UnitCell tmp = detail::grid_cell(nx, ny);
    for (const Bar& b : tmp.bars) {
      if ((b.i == 0 && b.j == nx + 1 && b.shift == Shift::Zero()) ||
          (b.i == nx + 1 && b.j == 0 && b.shift == Shift::Zero()))
        continue;  // removed diagonal
      Bar nb = b;
      nb.i += layer * n;
      nb.j += layer * n;
      cell.bars.push_back(nb);
    }
  }

  // Tube rings: 4 corners per layer, counterclockwise, centered at (0.5, 0.5).
  const double c = 0.5, t2 = tube / 2.0;
  const std::array<Vec2, 4> ring = {Vec2(c - t2, c - t2), Vec2(c + t2, c - t2),
                                    Vec2(c + t2, c + t2), Vec2(c - t2, c + t2)};
  const int rbase = 2 * n;
  for (int layer = 0; layer < 2; ++layer)
    for (int s = 0; s < 4; ++s)
      cell.nodes[rbase + 4 * layer + s] = {ring[s], layer == 0 ? 0.0 : gap};

  const auto plain = [](int i, int j) { return Bar{i, j, Shift::Zero(), 1.0}; };
  // Outer corners of the punched square, counterclockwise.
  const std::array<int, 4> outer = {0, 1, nx + 1, nx};
  for (int layer = 0; layer < 2; ++layer) {
    const int lo = layer * n;
    const int lr = rbase + 4 * layer;
    for (int s = 0; s < 4; ++s) {
      const int sn = (s + 1) % 4;
      // Annulus between square boundary and ring: ring edge, spoke, diagonal.
      cell.bars.push_back(plain(lr + s, lr + sn));
      cell.bars.push_back(plain(lo + outer[s], lr + s));
      cell.bars.push_back(plain(lo + outer[s], lr + sn));
    }
  }
  // Tube walls between the two rings: verticals plus one diagonal per side.
  for (int s = 0; s < 4; ++s) {
    const int sn = (s + 1) % 4;
    cell.bars.push_back(plain(rbase + s, rbase + 4 + s));
    cell.bars.push_back(plain(rbase + s, rbase + 4 + sn));
  }

  detail::apply_stiffness_rule(cell);
  // Element counts of the closed tiled surface, recorded by construction.
  const int euler_v = 2 * n + 8;
  const int euler_e = 6 * n + 30;
  const int euler_f = 4 * n + 20;
  cell.metadata = {{"generator", "handle"},
                   {"nx", std::to_string(nx)},
                   {"ny", std::to_string(ny)},
                   {"gap", detail::fmt(gap)},
                   {"tube", detail::fmt(tube)},
                   {"euler_v", std::to_string(euler_v)},
                   {"euler_e", std::to_string(euler_e)},
                   {"euler_f", std::to_string(euler_f)}};
  validate_or_throw(cell);
  return cell;
}

}  // namespace shellmech
