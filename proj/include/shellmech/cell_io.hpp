#pragma once

// Unit-cell file I/O and mesh export.
//
// Cell files are JSON documents:
//   { "lattice": {"a1":[f,f], "a2":[f,f]},
//     "nodes":   [{"x":[f,f], "z":f}, ...],
//     "bars":    [{"i":int, "j":int, "shift":[int,int], "k":f}, ...],
//     "metadata": {"key": "value", ...} }
// Round trips are exact: no arithmetic is performed on load or save.

#include "shellmech/cell.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>

namespace shellmech {

inline nlohmann::json cell_to_json(const UnitCell& cell) {
  nlohmann::json doc;
  doc["lattice"] = {{"a1", {cell.lattice.a1.x(), cell.lattice.a1.y()}},
                    {"a2", {cell.lattice.a2.x(), cell.lattice.a2.y()}}};
  doc["nodes"] = nlohmann::json::array();
  for (const Node& n : cell.nodes)
    doc["nodes"].push_back({{"x", {n.x.x(), n.x.y()}}, {"z", n.z}});
  doc["bars"] = nlohmann::json::array();
  for (const Bar& b : cell.bars)
    doc["bars"].push_back({{"i", b.i},
                           {"j", b.j},
                           {"shift", {b.shift.x(), b.shift.y()}},
                           {"k", b.stiffness}});
  doc["metadata"] = cell.metadata;
  return doc;
}

inline UnitCell cell_from_json(const nlohmann::json& doc) {
  UnitCell cell;
  try {
    const auto& lat = doc.at("lattice");
    cell.lattice.a1 = Vec2(lat.at("a1").at(0), lat.at("a1").at(1));
    cell.lattice.a2 = Vec2(lat.at("a2").at(0), lat.at("a2").at(1));
    for (const auto& n : doc.at("nodes")) {
      Node node;
      node.x = Vec2(n.at("x").at(0), n.at("x").at(1));
      node.z = n.at("z");
      cell.nodes.push_back(node);
    }
    for (const auto& b : doc.at("bars")) {
      Bar bar;
      bar.i = b.at("i");
      bar.j = b.at("j");
      bar.shift = Shift(b.at("shift").at(0), b.at("shift").at(1));
      bar.stiffness = b.at("k");
      cell.bars.push_back(bar);
    }
    if (doc.contains("metadata"))
      for (const auto& [k, v] : doc.at("metadata").items())
        cell.metadata[k] = v.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw CellError(std::string("malformed cell file: ") + e.what());
  }
  validate_or_throw(cell);
  return cell;
}

inline void save_cell(const UnitCell& cell, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CellError("cannot open " + path + " for writing");
  out << cell_to_json(cell).dump(2) << "\n";
  if (!out) throw CellError("write failed: " + path);
}

inline UnitCell load_cell(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CellError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw CellError(std::string("malformed cell file: ") + e.what());
  }
  return cell_from_json(doc);
}

// A periodic triangle: three (node, shift) vertices, canonicalized so the
// lexicographically smallest translate is stored.
struct Triangle {
  std::array<int, 3> nodes;
  std::array<Shift, 3> shifts;
};

// Enumerates the 3-cliques of the tiled bar graph, one representative per
// lattice orbit. For the meshes the generators build these are exactly the
// mesh faces.
inline std::vector<Triangle> enumerate_triangles(const UnitCell& cell) {
  const int n = cell.num_nodes();
  std::set<std::tuple<int, int, int, int>> edges;
  for (const Bar& b : cell.bars) edges.insert(bar_key(b));
  const auto has_edge = [&edges](int i, const Shift& si, int j,
                                 const Shift& sj) {
    Bar probe;
    probe.i = i;
    probe.j = j;
    probe.shift = sj - si;
    return edges.count(bar_key(probe)) > 0;
  };

  std::vector<std::vector<std::pair<int, Shift>>> adj(n);
  for (const Bar& b : cell.bars) {
    adj[b.i].push_back({b.j, b.shift});
    adj[b.j].push_back({b.i, -b.shift});
  }

  using Key = std::array<int, 9>;
  const auto canonical = [](std::array<std::pair<int, Shift>, 3> tri) {
    Key best{};
    bool first = true;
    for (int base = 0; base < 3; ++base) {
      std::array<std::array<int, 3>, 3> refs;
      for (int v = 0; v < 3; ++v)
        refs[v] = {tri[v].first, tri[v].second.x() - tri[base].second.x(),
                   tri[v].second.y() - tri[base].second.y()};
      std::sort(refs.begin(), refs.end());
      Key key{refs[0][0], refs[0][1], refs[0][2], refs[1][0], refs[1][1],
              refs[1][2], refs[2][0], refs[2][1], refs[2][2]};
      if (first || key < best) {
        best = key;
        first = false;
      }
    }
    return best;
  };

  std::set<Key> seen;
  std::vector<Triangle> tris;
  for (int u = 0; u < n; ++u) {
    for (std::size_t p = 0; p < adj[u].size(); ++p) {
      for (std::size_t q = p + 1; q < adj[u].size(); ++q) {
        const auto& [v, sv] = adj[u][p];
        const auto& [w, sw] = adj[u][q];
        if (v == w && sv == sw) continue;
        if (!has_edge(v, sv, w, sw)) continue;
        const Key key = canonical({std::make_pair(u, Shift::Zero()),
                                   std::make_pair(v, sv),
                                   std::make_pair(w, sw)});
        if (!seen.insert(key).second) continue;
        Triangle t;
        t.nodes = {key[0], key[3], key[6]};
        t.shifts = {Shift(key[1], key[2]), Shift(key[4], key[5]),
                    Shift(key[7], key[8])};
        tris.push_back(t);
      }
    }
  }
  return tris;
}

// Writes the tiled cell as an ASCII triangle mesh (v/f records, 1-based
// faces). Vertex count is nodes * tiles1 * tiles2; faces wrap modulo the
// tile block so the count is faces * tiles1 * tiles2.
inline void export_obj(const UnitCell& cell, int tiles1, int tiles2,
                       const std::string& path) {
  if (tiles1 < 1 || tiles2 < 1)
    throw CellError("export_obj: tiles must be >= 1");
  std::ofstream out(path);
  if (!out) throw CellError("cannot open " + path + " for writing");

  const int n = cell.num_nodes();
  char buf[128];
  for (int b = 0; b < tiles2; ++b) {
    for (int a = 0; a < tiles1; ++a) {
      for (int k = 0; k < n; ++k) {
        const Vec3 p = cell.position(k, Shift(a, b));
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x(), p.y(),
                      p.z());
        out << buf;
      }
    }
  }

  const auto vid = [&](int node, int a, int b) {
    const int ta = ((a % tiles1) + tiles1) % tiles1;
    const int tb = ((b % tiles2) + tiles2) % tiles2;
    return (tb * tiles1 + ta) * n + node + 1;
  };

  std::vector<Triangle> tris = enumerate_triangles(cell);
  // Orient consistently upward where the planar projection is nondegenerate.
  for (Triangle& t : tris) {
    const Vec3 p0 = cell.position(t.nodes[0], t.shifts[0]);
    const Vec3 p1 = cell.position(t.nodes[1], t.shifts[1]);
    const Vec3 p2 = cell.position(t.nodes[2], t.shifts[2]);
    const double signed2 = (p1.x() - p0.x()) * (p2.y() - p0.y()) -
                           (p1.y() - p0.y()) * (p2.x() - p0.x());
    if (signed2 < 0.0) {
      std::swap(t.nodes[1], t.nodes[2]);
      std::swap(t.shifts[1], t.shifts[2]);
    }
  }
  for (int b = 0; b < tiles2; ++b)
    for (int a = 0; a < tiles1; ++a)
      for (const Triangle& t : tris)
        out << "f " << vid(t.nodes[0], a + t.shifts[0].x(), b + t.shifts[0].y())
            << " " << vid(t.nodes[1], a + t.shifts[1].x(), b + t.shifts[1].y())
            << " " << vid(t.nodes[2], a + t.shifts[2].x(), b + t.shifts[2].y())
            << "\n";
  if (!out) throw CellError("write failed: " + path);
}

}  // namespace shellmech
