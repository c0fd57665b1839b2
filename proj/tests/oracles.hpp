#pragma once

// Brute-force references shared by the unit and acceptance tests. They deliberately avoid
// the library's own geometry routines beyond the vector type.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pdm/mesh.hpp"
#include "pdm/phantom.hpp"

namespace oracle {

using pdm::Vec2;

struct HalfPlane {
  Vec2 a;
  Vec2 b;
};

// Signed distance to the intersection of left half-planes, inside > 0 (exact inside).
inline double region_depth(const std::vector<HalfPlane>& planes, Vec2 p) {
  double d = 1e300;
  for (const auto& h : planes) {
    const Vec2 t = h.b - h.a;
    d = std::min(d, pdm::cross(t, p - h.a) / pdm::norm(t));
  }
  return d;
}

inline pdm::FluidBoundaryPiece wall_piece(Vec2 a, Vec2 b) {
  pdm::FluidBoundaryPiece p;
  p.a = a;
  p.b = b;
  return p;
}

// Region bounded by the closed polygon through `corners`, counterclockwise.
inline pdm::FluidRegionSpec polygon_region(const std::vector<Vec2>& corners) {
  std::vector<pdm::FluidBoundaryPiece> pieces;
  for (std::size_t i = 0; i < corners.size(); ++i) pieces.push_back(wall_piece(corners[i], corners[(i + 1) % corners.size()]));
  return pdm::FluidRegionSpec(std::move(pieces));
}

inline std::vector<HalfPlane> planes_of(const pdm::FluidRegionSpec& spec) {
  std::vector<HalfPlane> out;
  for (const auto& p : spec.pieces()) out.push_back({p.a, p.b});
  return out;
}

// Barycentric lattice with (n + 1)(n + 2) / 2 points including vertices and edges; n = 140
// gives 10011 points per element.
struct SampleResult {
  bool any_inside = false;
  double max_depth = -1e300;
};

inline SampleResult sample_element(const std::array<Vec2, 3>& x, const std::vector<HalfPlane>& planes, int n = 140) {
  SampleResult r;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      const double l0 = static_cast<double>(i) / n;
      const double l1 = static_cast<double>(j) / n;
      const Vec2 p = l0 * x[0] + l1 * x[1] + (1.0 - l0 - l1) * x[2];
      const double d = region_depth(planes, p);
      r.max_depth = std::max(r.max_depth, d);
      if (d > 0.0) r.any_inside = true;
    }
  }
  return r;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double t = std::clamp(pdm::dot(p - a, ab) / pdm::dot(ab, ab), 0.0, 1.0);
  return pdm::distance(p, a + t * ab);
}

inline bool segments_cross(Vec2 p, Vec2 q, Vec2 a, Vec2 b) {
  const double d1 = pdm::cross(q - p, a - p);
  const double d2 = pdm::cross(q - p, b - p);
  const double d3 = pdm::cross(b - a, p - a);
  const double d4 = pdm::cross(b - a, q - a);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

inline bool inside_triangle(Vec2 p, const std::array<Vec2, 3>& x) {
  const double s0 = pdm::cross(x[1] - x[0], p - x[0]);
  const double s1 = pdm::cross(x[2] - x[1], p - x[1]);
  const double s2 = pdm::cross(x[0] - x[2], p - x[2]);
  return (s0 >= 0 && s1 >= 0 && s2 >= 0) || (s0 <= 0 && s1 <= 0 && s2 <= 0);
}

// Distance between a closed triangle and a segment.
inline double triangle_segment_distance(const std::array<Vec2, 3>& x, Vec2 a, Vec2 b) {
  if (inside_triangle(a, x) || inside_triangle(b, x)) return 0.0;
  double d = 1e300;
  for (int k = 0; k < 3; ++k) {
    const Vec2 p = x[k];
    const Vec2 q = x[(k + 1) % 3];
    if (segments_cross(p, q, a, b)) return 0.0;
    d = std::min({d, point_segment_distance(p, a, b), point_segment_distance(a, p, q), point_segment_distance(b, p, q)});
  }
  return d;
}

inline double distance_to_boundary(const std::array<Vec2, 3>& x, const pdm::FluidRegionSpec& spec) {
  double d = 1e300;
  for (const auto& p : spec.pieces()) d = std::min(d, triangle_segment_distance(x, p.a, p.b));
  return d;
}

inline double longest_edge(const std::array<Vec2, 3>& x) {
  return std::max({pdm::distance(x[0], x[1]), pdm::distance(x[1], x[2]), pdm::distance(x[2], x[0])});
}

// Structured square mesh with jittered interior nodes, rotated and shifted at random.
inline pdm::Mesh random_mesh(std::mt19937& rng) {
  std::uniform_int_distribution<int> cells(2, 10);
  int nx = cells(rng);
  int ny = cells(rng);
  while (2 * nx * ny > 200) (nx > ny ? nx : ny) -= 1;
  pdm::Mesh m = pdm::build_plain_channel_mesh(1.0, 1.0, nx, ny);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> shift(-0.3, 0.3);
  const double theta = angle(rng);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Vec2 offset{shift(rng), shift(rng)};
  for (auto& node : m.nodes) {
    Vec2 p = node.x;
    const bool edge = p.x < 1e-12 || p.y < 1e-12 || p.x > 1 - 1e-12 || p.y > 1 - 1e-12;
    if (!edge) p += Vec2{jitter(rng) / nx, jitter(rng) / ny};
    p -= Vec2{0.5, 0.5};
    node.x = Vec2{c * p.x - s * p.y, s * p.x + c * p.y} + Vec2{0.5, 0.5} + offset;
  }
  return m;
}

// Convex polygon through 3..8 random points on a circle, counterclockwise.
inline pdm::FluidRegionSpec random_region(std::mt19937& rng) {
  std::uniform_int_distribution<int> count(3, 8);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> radius(0.25, 0.8);
  std::uniform_real_distribution<double> centre(0.2, 0.8);
  for (;;) {
    const int k = count(rng);
    std::vector<double> t(k);
    for (auto& v : t) v = angle(rng);
    std::sort(t.begin(), t.end());
    const double r = radius(rng);
    const Vec2 c{centre(rng), centre(rng)};
    std::vector<pdm::FluidBoundaryPiece> pieces;
    for (int i = 0; i < k; ++i) {
      const Vec2 a = c + r * Vec2{std::cos(t[i]), std::sin(t[i])};
      const Vec2 b = c + r * Vec2{std::cos(t[(i + 1) % k]), std::sin(t[(i + 1) % k])};
      pieces.push_back(wall_piece(a, b));
    }
    // Reject polygons that are nearly degenerate (all points on a short arc).
    double area = 0.0;
    for (const auto& p : pieces) area += 0.5 * pdm::cross(p.a, p.b);
    bool short_piece = false;
    for (const auto& p : pieces) short_piece |= pdm::distance(p.a, p.b) < 1e-3;
    if (area > 0.05 && !short_piece) return pdm::FluidRegionSpec(std::move(pieces));
  }
}

}  // namespace oracle
