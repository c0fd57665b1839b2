#include <cmath>
#include <numbers>

#include "pdm/errors.hpp"
#include "pdm/mesh.hpp"

namespace pdm {

namespace {

void add_edge(Mesh& mesh, int a, int b, BoundaryTag tag) { mesh.boundary_edges.push_back({{a, b}, tag}); }

// Two counterclockwise triangles per cell, diagonal from lower-left to upper-right.
void add_cell(Mesh& mesh, int a0, int a1, int b0, int b1, bool phantom, std::optional<int> ring) {
  mesh.elements.push_back({{a0, a1, b1}, phantom, ring});
  mesh.elements.push_back({{a0, b1, b0}, phantom, ring});
}

Mesh channel(double length, double height, int nx, int ny, int layers) {
  const double dx = length / nx;
  const double dy = height / ny;
  const int rows = ny + 2 * layers + 1;
  const int cols = nx + 1;
  const auto id = [cols](int r, int i) { return r * cols + i; };
  const int column_T = static_cast<int>(std::lround(0.5 * nx));

  Mesh mesh;
  mesh.nodes.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int i = 0; i < cols; ++i) {
      Node n;
      n.id = id(r, i);
      n.x = {i * dx, (r - layers) * dy};
      if (i == nx) n.x.x = length;
      if (r - layers == ny) n.x.y = height;
      const bool in_fluid = r >= layers && r <= layers + ny;
      if (in_fluid && (i == 0 || i == nx)) n.motion = MotionClass::fixed;
      if (layers == 0 && (r == 0 || r == rows - 1)) n.motion = MotionClass::fixed;
      if (i == column_T && std::abs(n.x.y - 0.5 * height) < 0.25 * height) {
        n.motion = MotionClass::prescribed;
        n.tags.add(BoundaryTag::gamma_T);
      }
      mesh.nodes.push_back(n);
    }
  }

  RingStructure ring;
  for (int r = 0; r < rows; ++r) {
    std::vector<int> row(cols);
    for (int i = 0; i < cols; ++i) row[i] = id(r, i);
    ring.node_rows.push_back(std::move(row));
  }
  for (int r = 0; r + 1 < rows; ++r) {
    const bool phantom = r < layers || r >= layers + ny;
    std::vector<int> elem_row;
    for (int i = 0; i < nx; ++i) {
      elem_row.push_back(static_cast<int>(mesh.elements.size()));
      elem_row.push_back(static_cast<int>(mesh.elements.size()) + 1);
      add_cell(mesh, id(r, i), id(r, i + 1), id(r + 1, i), id(r + 1, i + 1), phantom,
               layers > 0 ? std::optional<int>(r) : std::nullopt);
    }
    ring.elem_rows.push_back(std::move(elem_row));
  }

  const BoundaryTag exterior = layers > 0 ? BoundaryTag::phantom_exterior : BoundaryTag::wall;
  for (int i = 0; i < nx; ++i) add_edge(mesh, id(0, i), id(0, i + 1), exterior);
  for (int i = 0; i < nx; ++i) add_edge(mesh, id(rows - 1, i + 1), id(rows - 1, i), exterior);
  for (int r = 0; r + 1 < rows; ++r) {
    const bool phantom = r < layers || r >= layers + ny;
    add_edge(mesh, id(r + 1, 0), id(r, 0), phantom ? BoundaryTag::phantom_exterior : BoundaryTag::inflow);
    add_edge(mesh, id(r, nx), id(r + 1, nx), phantom ? BoundaryTag::phantom_exterior : BoundaryTag::outflow);
  }
  if (layers > 0) {
    for (int i = 0; i < nx; ++i) add_edge(mesh, id(layers, i), id(layers, i + 1), BoundaryTag::gamma_PF);
    for (int i = 0; i < nx; ++i) {
      add_edge(mesh, id(layers + ny, i + 1), id(layers + ny, i), BoundaryTag::gamma_PF);
    }
  }
  for (int r = 0; r + 1 < rows; ++r) {
    if (mesh.nodes[id(r, column_T)].tags.has(BoundaryTag::gamma_T) &&
        mesh.nodes[id(r + 1, column_T)].tags.has(BoundaryTag::gamma_T)) {
      add_edge(mesh, id(r, column_T), id(r + 1, column_T), BoundaryTag::gamma_T);
    }
  }

  if (layers > 0) {
    mesh.ring = std::move(ring);
    link_ring_exteriors(mesh);
  }
  refresh_node_tags(mesh);
  return mesh;
}

}  // namespace

void link_ring_exteriors(Mesh& mesh) {
  mesh.ring_links.clear();
  if (!mesh.ring) return;
  const auto& bottom = mesh.ring->node_rows.front();
  const auto& top = mesh.ring->node_rows.back();
  for (std::size_t i = 0; i + 1 < bottom.size(); ++i) {
    mesh.ring_links.push_back({{bottom[i], bottom[i + 1]}, {top[i], top[i + 1]}});
  }
}

Mesh build_channel_mesh(double length, double height, int nx, int ny, int phantom_layers) {
  if (!(length > 0.0) || !(height > 0.0)) throw InvalidArgument("channel dimensions must be positive");
  if (nx < 2 || ny < 2) throw InvalidArgument("channel resolution must be at least 2 x 2");
  if (phantom_layers < 1) throw InvalidArgument("at least one phantom layer is required");
  return channel(length, height, nx, ny, phantom_layers);
}

Mesh build_plain_channel_mesh(double length, double height, int nx, int ny) {
  if (!(length > 0.0) || !(height > 0.0)) throw InvalidArgument("channel dimensions must be positive");
  if (nx < 2 || ny < 2) throw InvalidArgument("channel resolution must be at least 2 x 2");
  return channel(length, height, nx, ny, 0);
}

Mesh build_container_disk_mesh(const ContainerDiskGeometry& g) {
  if (!(g.width > 0.0) || !(g.height > 0.0) || !(g.disk_radius > 0.0)) {
    throw InvalidArgument("container and disk dimensions must be positive");
  }
  if (g.nx < 2 || g.ny < 2 || g.phantom_layers < 0 || g.block_half_cells < 1 || g.ogrid_layers < 1) {
    throw InvalidArgument("invalid container mesh resolution");
  }
  const int p = g.phantom_layers;
  const int b = g.block_half_cells;
  const double dx = g.width / g.nx;
  const double dy = g.height / g.ny;
  const int rows = g.ny + 2 * p + 1;
  const int cols = g.nx + 1;
  const int ic = static_cast<int>(std::lround(g.disk_center.x / dx));
  const int rc = static_cast<int>(std::lround(g.disk_center.y / dy)) + p;
  if (std::abs(ic * dx - g.disk_center.x) > 1e-9 * g.width ||
      std::abs((rc - p) * dy - g.disk_center.y) > 1e-9 * g.height) {
    throw InvalidArgument("disk center must coincide with a background grid node");
  }
  if (ic - b < 1 || ic + b > g.nx - 1 || rc - b < p + 1 || rc + b > p + g.ny - 1) {
    throw InvalidArgument("O-grid block must lie strictly inside the container");
  }
  if (g.disk_radius >= b * std::min(dx, dy)) throw InvalidArgument("disk does not fit inside its O-grid block");

  Mesh mesh;
  std::vector<int> grid(static_cast<std::size_t>(rows) * cols, -1);
  const auto gid = [&](int r, int i) -> int& { return grid[static_cast<std::size_t>(r) * cols + i]; };
  const auto inside_block = [&](int r, int i) { return i > ic - b && i < ic + b && r > rc - b && r < rc + b; };

  for (int r = 0; r < rows; ++r) {
    for (int i = 0; i < cols; ++i) {
      if (inside_block(r, i)) continue;
      Node n;
      n.id = static_cast<int>(mesh.nodes.size());
      n.x = {i * dx, (r - p) * dy};
      if (i == 0 || i == g.nx) {
        n.motion = MotionClass::axis_constrained;
        n.constrained_component = 0;
      }
      if (p == 0 && (r == 0 || r == rows - 1)) n.motion = MotionClass::fixed;
      gid(r, i) = n.id;
      mesh.nodes.push_back(n);
    }
  }

  // Block perimeter, counterclockwise from the lower-left corner.
  std::vector<int> perimeter;
  for (int i = ic - b; i < ic + b; ++i) perimeter.push_back(gid(rc - b, i));
  for (int r = rc - b; r < rc + b; ++r) perimeter.push_back(gid(r, ic + b));
  for (int i = ic + b; i > ic - b; --i) perimeter.push_back(gid(rc + b, i));
  for (int r = rc + b; r > rc - b; --r) perimeter.push_back(gid(r, ic - b));

  const Vec2 center{ic * dx, (rc - p) * dy};
  const int m = g.ogrid_layers;
  const auto np = perimeter.size();
  std::vector<std::vector<int>> layer(m + 1, std::vector<int>(np));
  layer[m] = perimeter;
  for (std::size_t s = 0; s < np; ++s) {
    const Vec2 outer = mesh.nodes[perimeter[s]].x;
    const double angle = std::atan2(outer.y - center.y, outer.x - center.x);
    const Vec2 on_circle = center + g.disk_radius * Vec2{std::cos(angle), std::sin(angle)};
    for (int k = 0; k < m; ++k) {
      Node n;
      n.id = static_cast<int>(mesh.nodes.size());
      const double t = static_cast<double>(k) / m;
      n.x = on_circle + t * (outer - on_circle);
      if (k == 0) n.motion = MotionClass::prescribed;
      layer[k][s] = n.id;
      mesh.nodes.push_back(n);
    }
  }

  RingStructure ring;
  for (int r = 0; r < rows; ++r) {
    std::vector<int> row;
    bool complete = true;
    for (int i = 0; i < cols; ++i) {
      complete = complete && gid(r, i) >= 0;
      row.push_back(gid(r, i));
    }
    ring.node_rows.push_back(complete ? row : std::vector<int>{});
  }
  for (int r = 0; r + 1 < rows; ++r) {
    const bool phantom = r < p || r >= p + g.ny;
    const bool block_row = r >= rc - b && r < rc + b;
    std::vector<int> elem_row;
    for (int i = 0; i < g.nx; ++i) {
      if (block_row && i >= ic - b && i < ic + b) continue;
      if (!block_row) {
        elem_row.push_back(static_cast<int>(mesh.elements.size()));
        elem_row.push_back(static_cast<int>(mesh.elements.size()) + 1);
      }
      add_cell(mesh, gid(r, i), gid(r, i + 1), gid(r + 1, i), gid(r + 1, i + 1), phantom,
               block_row || p == 0 ? std::nullopt : std::optional<int>(r));
    }
    ring.elem_rows.push_back(block_row ? std::vector<int>{} : std::move(elem_row));
  }
  for (int k = 0; k < m; ++k) {
    for (std::size_t s = 0; s < np; ++s) {
      const std::size_t s1 = (s + 1) % np;
      const int in0 = layer[k][s], in1 = layer[k][s1];
      const int out0 = layer[k + 1][s], out1 = layer[k + 1][s1];
      mesh.elements.push_back({{in0, out0, out1}, false, std::nullopt});
      mesh.elements.push_back({{in0, out1, in1}, false, std::nullopt});
    }
  }

  for (std::size_t s = 0; s < np; ++s) {
    // Hole boundary runs clockwise so the fluid lies on its left.
    add_edge(mesh, layer[0][(s + 1) % np], layer[0][s], BoundaryTag::moving_body);
  }
  const BoundaryTag bottom_tag = p > 0 ? BoundaryTag::phantom_exterior : BoundaryTag::wall;
  const BoundaryTag top_tag = p > 0 ? BoundaryTag::phantom_exterior : BoundaryTag::outflow;
  for (int i = 0; i < g.nx; ++i) add_edge(mesh, gid(0, i), gid(0, i + 1), bottom_tag);
  for (int i = 0; i < g.nx; ++i) add_edge(mesh, gid(rows - 1, i + 1), gid(rows - 1, i), top_tag);
  for (int r = 0; r + 1 < rows; ++r) {
    add_edge(mesh, gid(r + 1, 0), gid(r, 0), BoundaryTag::wall);
    add_edge(mesh, gid(r, g.nx), gid(r + 1, g.nx), BoundaryTag::wall);
  }
  if (p > 0) {
    for (int i = 0; i < g.nx; ++i) add_edge(mesh, gid(p, i), gid(p, i + 1), BoundaryTag::gamma_PF);
    for (int i = 0; i < g.nx; ++i) add_edge(mesh, gid(p + g.ny, i + 1), gid(p + g.ny, i), BoundaryTag::gamma_PF);
    mesh.ring = std::move(ring);
    link_ring_exteriors(mesh);
  }
  refresh_node_tags(mesh);
  return mesh;
}

}  // namespace pdm
