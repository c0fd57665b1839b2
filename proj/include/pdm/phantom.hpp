#pragma once

#include <map>
#include <optional>
#include <vector>

#include "pdm/elastic.hpp"
#include "pdm/mesh.hpp"

namespace pdm {

/// One straight piece of the prescribed fluid boundary. The fluid lies on its left.
struct FluidBoundaryPiece {
  Vec2 a;
  Vec2 b;
  bool open = false;    // natural (traction-free) flow boundary instead of a wall
  Vec2 wall_velocity;   // flow velocity imposed on interface nodes projected onto this piece
};

/// Convex fluid region: the intersection of the left half-planes of its pieces. The
/// pieces double as the Γ_PF polylines used by the closest-point correction.
class FluidRegionSpec {
 public:
  /// Throws InvalidArgument if a piece is degenerate or the region has an empty interior
  /// (which is also what an inconsistent orientation produces).
  explicit FluidRegionSpec(std::vector<FluidBoundaryPiece> pieces);

  const std::vector<FluidBoundaryPiece>& pieces() const { return pieces_; }

  /// min over pieces of the signed distance to the supporting line, inside > 0. Exact
  /// inside the region and a lower bound of the true distance outside.
  double signed_distance(const Vec2& p) const;
  bool inside(const Vec2& p) const { return signed_distance(p) > 0.0; }

  /// Closest point on the union of pieces; ties go to the lowest piece index.
  PolylineHit closest_boundary_point(const Vec2& p) const;

  /// Area of the part of the triangle lying at least `depth` inside the region.
  double clipped_area(const std::array<Vec2, 3>& tri, double depth = 0.0) const;

 private:
  std::vector<FluidBoundaryPiece> pieces_;
};

/// Horizontal strip between two walls, y in [y_bottom, y_top], wide enough to contain
/// [x_min, x_max]. Both walls have the given velocities; `open_top` makes the upper one natural.
FluidRegionSpec horizontal_strip(double x_min, double x_max, double y_bottom, double y_top,
                                 bool open_top = false, Vec2 bottom_velocity = {}, Vec2 top_velocity = {});

struct ActivityPattern {
  std::vector<char> active;
  int epoch = 0;

  int count() const;
  friend bool operator==(const ActivityPattern&, const ActivityPattern&) = default;
};

/// An element is active when the part of it lying at least depth_fraction x (its smallest
/// altitude) inside the region has positive area. With the default of 0 this is exactly
/// "intersects the open fluid region"; tangential contact leaves the element inactive.
ActivityPattern classify_activity(const Mesh& mesh_upper, const FluidRegionSpec& spec, double depth_fraction = 0.0,
                                  int epoch = 0);

struct InterfaceSet {
  std::vector<int> nodes;   // sorted; fixed nodes are excluded
  std::vector<Edge> edges;  // sorted edge keys
};

/// Edges with one active and one inactive neighbour. Updates interface_GI node tags.
InterfaceSet extract_interface(Mesh& mesh, const ActivityPattern& pattern);

/// Displacement moving each interface node onto its closest point of the region boundary.
/// Throws StepRejected listing the nodes whose move would invert an adjacent element.
DisplacementField conform_interface(const Mesh& mesh, const InterfaceSet& iface, const FluidRegionSpec& spec);

/// The same displacement without the inversion check.
DisplacementField closest_point_displacement(const Mesh& mesh, const InterfaceSet& iface, const FluidRegionSpec& spec);

struct Donor {
  int element = -1;  // -1 marks the nearest-node fallback
  std::array<int, 3> nodes{};
  std::array<double, 3> weights{};
};

struct ProjectionRecord {
  std::vector<int> newly_activated;
  std::map<int, Donor> donors;  // node -> interpolation stencil in the old active mesh
  int fallbacks = 0;

  bool empty() const { return newly_activated.empty() && donors.empty(); }
};

/// For every node of a newly activated element that is not a node of any previously active
/// element, locates `positions[node]` (defaults to the node coordinates of mesh_old) among the
/// previously active elements of mesh_old.
ProjectionRecord build_projection_records(const ActivityPattern& pattern_old, const ActivityPattern& pattern_new,
                                          const Mesh& mesh_old, const std::vector<Vec2>* positions = nullptr);

/// Moves element rows along the virtual ring. A positive shift takes the topmost node row
/// and reattaches it below the bottom exterior (the strip moves down by one row); a
/// negative shift does the opposite. Throws UnsupportedOperation without ring links.
Mesh apply_ring_shift(Mesh mesh, int shift);

/// Smallest positive shift that maps the connectivity onto itself. Node rows cycle with
/// period R (their count) and element rows with period R - 1, so this is R (R - 1).
int ring_circumference(const Mesh& mesh);

}  // namespace pdm
