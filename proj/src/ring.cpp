#include <map>
#include <set>

#include "pdm/errors.hpp"
#include "pdm/phantom.hpp"

namespace pdm {

namespace {

// Moves node row `m` (an exterior row) to the opposite exterior, next to row `o`, and
// reconnects the element row `e` that lay between `m` and its neighbour `a` so that it now
// fills the gap between `o` and `m`.
void relocate_row(Mesh& mesh, const std::vector<int>& m, const std::vector<int>& a, const std::vector<int>& o,
                  const std::vector<int>& e) {
  const std::size_t n = m.size();
  std::map<int, int> col_m, col_a, col_o;
  for (std::size_t i = 0; i < n; ++i) {
    col_m[m[i]] = static_cast<int>(i);
    col_a[a[i]] = static_cast<int>(i);
    col_o[o[i]] = static_cast<int>(i);
  }
  // The relocated row sits at the same offset from o that a had from m.
  std::vector<Vec2> moved(n);
  for (std::size_t i = 0; i < n; ++i) {
    moved[i] = mesh.nodes[o[i]].x + (mesh.nodes[a[i]].x - mesh.nodes[m[i]].x);
  }
  for (std::size_t i = 0; i < n; ++i) mesh.nodes[m[i]].x = moved[i];

  const auto remap = [&](int v) {
    if (auto it = col_m.find(v); it != col_m.end()) return o[it->second];
    if (auto it = col_a.find(v); it != col_a.end()) return m[it->second];
    return v;
  };
  for (int id : e) {
    for (int& v : mesh.elements[id].nodes) v = remap(v);
  }

  std::vector<BoundaryEdge> edges;
  for (const auto& be : mesh.boundary_edges) {
    const int u = be.nodes[0];
    const int v = be.nodes[1];
    const bool on_m = col_m.count(u) && col_m.count(v);
    const bool on_o = col_o.count(u) && col_o.count(v);
    const bool side = (col_m.count(u) && col_a.count(v)) || (col_a.count(u) && col_m.count(v));
    if (on_m && !is_internal_tag(be.tag)) {
      // Exterior along m becomes exterior along a.
      edges.push_back({{a[col_m[u]], a[col_m[v]]}, be.tag});
    } else if (on_o && !is_internal_tag(be.tag)) {
      // Exterior along o becomes exterior along the relocated m.
      edges.push_back({{m[col_o[u]], m[col_o[v]]}, be.tag});
    } else if (side) {
      edges.push_back({{remap(u), remap(v)}, be.tag});
    } else {
      edges.push_back(be);
    }
  }
  std::set<Edge> existing;
  for (const auto& el : mesh.elements) {
    for (int k = 0; k < 3; ++k) existing.insert(edge_key(el.nodes[k], el.nodes[(k + 1) % 3]));
  }
  mesh.boundary_edges.clear();
  for (const auto& be : edges) {
    if (existing.count(edge_key(be.nodes[0], be.nodes[1]))) mesh.boundary_edges.push_back(be);
  }
}

void check_shiftable(const RingStructure& ring, std::size_t m, std::size_t a, std::size_t o, std::size_t e) {
  const auto& rows = ring.node_rows;
  const std::size_t n = rows[m].size();
  if (n == 0 || rows[a].size() != n || rows[o].size() != n || ring.elem_rows[e].empty()) {
    throw UnsupportedOperation("ring shift would move an unstructured section of the mesh");
  }
}

}  // namespace

Mesh apply_ring_shift(Mesh mesh, int shift) {
  if (mesh.ring_links.empty() || !mesh.ring) throw UnsupportedOperation("mesh has no virtual ring");
  auto& ring = *mesh.ring;
  const std::size_t rows = ring.node_rows.size();
  if (rows < 3 || ring.elem_rows.size() + 1 != rows) throw UnsupportedOperation("malformed ring structure");

  for (; shift < 0; ++shift) {
    check_shiftable(ring, 0, 1, rows - 1, 0);
    relocate_row(mesh, ring.node_rows[0], ring.node_rows[1], ring.node_rows[rows - 1], ring.elem_rows[0]);
    std::rotate(ring.node_rows.begin(), ring.node_rows.begin() + 1, ring.node_rows.end());
    std::rotate(ring.elem_rows.begin(), ring.elem_rows.begin() + 1, ring.elem_rows.end());
  }
  for (; shift > 0; --shift) {
    check_shiftable(ring, rows - 1, rows - 2, 0, rows - 2);
    relocate_row(mesh, ring.node_rows[rows - 1], ring.node_rows[rows - 2], ring.node_rows[0],
                 ring.elem_rows[rows - 2]);
    std::rotate(ring.node_rows.rbegin(), ring.node_rows.rbegin() + 1, ring.node_rows.rend());
    std::rotate(ring.elem_rows.rbegin(), ring.elem_rows.rbegin() + 1, ring.elem_rows.rend());
  }
  for (std::size_t r = 0; r < ring.elem_rows.size(); ++r) {
    for (int id : ring.elem_rows[r]) mesh.elements[id].ring_index = static_cast<int>(r);
  }
  link_ring_exteriors(mesh);
  refresh_node_tags(mesh);
  return mesh;
}

int ring_circumference(const Mesh& mesh) {
  if (!mesh.ring || mesh.ring_links.empty()) throw UnsupportedOperation("mesh has no virtual ring");
  const int rows = static_cast<int>(mesh.ring->node_rows.size());
  return rows * (rows - 1);
}

}  // namespace pdm
