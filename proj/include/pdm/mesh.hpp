#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdm/geometry.hpp"

namespace pdm {

enum class BoundaryTag : std::uint8_t {
  inflow,
  outflow,
  wall,
  gamma_T,           // internal section driving the mesh motion
  gamma_PF,          // prescribed fluid/phantom boundary
  phantom_exterior,  // outward-facing boundary of a phantom strip
  interface_GI,      // dynamic active/inactive interface
  moving_body,
};

inline constexpr int kBoundaryTagCount = 8;

std::string_view to_string(BoundaryTag tag);
std::optional<BoundaryTag> boundary_tag_from_string(std::string_view name);

/// Tags that may sit on edges with two adjacent elements.
constexpr bool is_internal_tag(BoundaryTag tag) {
  return tag == BoundaryTag::gamma_T || tag == BoundaryTag::gamma_PF ||
         tag == BoundaryTag::interface_GI;
}

class TagSet {
 public:
  constexpr bool has(BoundaryTag t) const { return (bits_ >> static_cast<int>(t)) & 1u; }
  constexpr void add(BoundaryTag t) { bits_ |= 1u << static_cast<int>(t); }
  constexpr void remove(BoundaryTag t) { bits_ &= ~(1u << static_cast<int>(t)); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint32_t bits() const { return bits_; }
  friend constexpr bool operator==(const TagSet&, const TagSet&) = default;

 private:
  std::uint32_t bits_ = 0;
};

enum class MotionClass : std::uint8_t { fixed, prescribed, free, axis_constrained };

struct Node {
  int id = 0;
  Vec2 x;
  TagSet tags;
  MotionClass motion = MotionClass::free;
  int constrained_component = 0;  // for axis_constrained: component held at zero displacement
};

struct Element {
  std::array<int, 3> nodes{};
  bool phantom_member = false;
  std::optional<int> ring_index;
};

using Edge = std::array<int, 2>;

/// Orientation-independent key for an edge.
constexpr Edge edge_key(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

struct BoundaryEdge {
  Edge nodes{};
  BoundaryTag tag = BoundaryTag::wall;
};

/// Logical pairing of an edge on one phantom exterior with an edge on the opposite exterior.
struct RingLink {
  Edge bottom{};
  Edge top{};
};

/// Structured bookkeeping of the element rows that can travel along the virtual ring.
/// node_rows are ordered from the bottom exterior to the top exterior; elem_rows[k]
/// holds the elements between node_rows[k] and node_rows[k + 1]. An empty node row or
/// element row marks an unstructured section that cannot be shifted.
struct RingStructure {
  std::vector<std::vector<int>> node_rows;
  std::vector<std::vector<int>> elem_rows;
};

struct Mesh {
  std::vector<Node> nodes;
  std::vector<Element> elements;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<RingLink> ring_links;
  std::optional<RingStructure> ring;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_elements() const { return elements.size(); }
  std::array<Vec2, 3> element_coords(std::size_t e) const {
    const auto& n = elements[e].nodes;
    return {nodes[n[0]].x, nodes[n[1]].x, nodes[n[2]].x};
  }
  std::vector<Vec2> coordinates() const;
  void set_coordinates(const std::vector<Vec2>& x);
  /// Length of the bounding-box diagonal.
  double diameter() const;
};

// ---------------------------------------------------------------------------
// Construction

/// Structured channel [0, length] x [0, height] split into nx x ny cells (two triangles
/// each), with `phantom_layers` rows of phantom cells above and below. Phantom strips
/// share the gamma_PF lines y = 0 and y = height with the fluid part and are linked into
/// a virtual ring through their exteriors.
Mesh build_channel_mesh(double length, double height, int nx, int ny, int phantom_layers);

/// Same channel without phantom strips; the walls are ordinary fixed `wall` boundaries.
Mesh build_plain_channel_mesh(double length, double height, int nx, int ny);

struct ContainerDiskGeometry {
  double width = 1.0;
  double height = 2.0;
  int nx = 16;
  int ny = 32;
  int phantom_layers = 2;  // 0 builds a closed container without phantom strips
  Vec2 disk_center{0.5, 1.5};
  double disk_radius = 0.125;
  int block_half_cells = 3;  // half-width of the O-grid block in cells
  int ogrid_layers = 2;
};

/// Rectangular container with a circular hole (the disk) meshed by an O-grid block
/// embedded in a structured background. Side walls are axis-constrained (vertical
/// sliding); the disk boundary is tagged moving_body and prescribed in the mesh motion.
Mesh build_container_disk_mesh(const ContainerDiskGeometry& g);

// ---------------------------------------------------------------------------
// Checks and metrics

struct ValidationReport {
  std::vector<int> inverted_elements;
  std::vector<std::pair<int, int>> duplicate_nodes;
  std::vector<Edge> non_manifold_edges;
  std::vector<int> dangling_links;  // indices into ring_links

  bool empty() const {
    return inverted_elements.empty() && duplicate_nodes.empty() && non_manifold_edges.empty() &&
           dangling_links.empty();
  }
  std::string summary() const;
};

ValidationReport validate(const Mesh& mesh);

struct ElementMetric {
  double area = 0.0;     // signed
  double h = 0.0;        // longest edge
  double quality = 0.0;  // 2 * inradius / circumradius, 0 for degenerate/inverted
};

ElementMetric triangle_metric(const Vec2& a, const Vec2& b, const Vec2& c);
std::vector<ElementMetric> element_metrics(const Mesh& mesh);

struct PolylineHit {
  Vec2 point;
  int segment = -1;
  double parameter = 0.0;
  double distance = 0.0;
};

/// Closest point to `p` on the union of segments; ties go to the lowest segment index.
PolylineHit closest_point_on_segments(const Vec2& p, const std::vector<std::array<Vec2, 2>>& segments);

/// Closest point on the boundary edges carrying `tag` (segment ids follow edge-list order).
PolylineHit closest_point_on_polyline(const Vec2& p, BoundaryTag tag, const Mesh& mesh);

/// Recomputes node tags from the boundary edges; gamma_T and interface tags are kept.
void refresh_node_tags(Mesh& mesh);

/// Rebuilds ring_links from the first and last node rows of the ring structure.
void link_ring_exteriors(Mesh& mesh);

/// Element ids adjacent to each node.
std::vector<std::vector<int>> node_to_elements(const Mesh& mesh);

}  // namespace pdm
