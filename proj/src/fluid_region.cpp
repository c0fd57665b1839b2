#include <algorithm>
#include <limits>

#include "pdm/errors.hpp"
#include "pdm/phantom.hpp"

namespace pdm {

namespace {

Vec2 inward_normal(const FluidBoundaryPiece& piece) {
  const Vec2 t = piece.b - piece.a;
  return Vec2{-t.y, t.x} * (1.0 / norm(t));
}

double polygon_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

}  // namespace

FluidRegionSpec::FluidRegionSpec(std::vector<FluidBoundaryPiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw InvalidArgument("fluid region needs at least one boundary piece");
  double scale = 0.0;
  for (const auto& p : pieces_) {
    if (!(distance(p.a, p.b) > 0.0)) throw InvalidArgument("degenerate fluid boundary piece");
    scale = std::max(scale, distance(p.a, p.b));
  }
  // Points just inside each piece must be inside the whole region, otherwise the region is
  // empty or a piece is oriented the wrong way round.
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    const Vec2 probe = 0.5 * (p.a + p.b) + 1e-6 * scale * inward_normal(p);
    if (!inside(probe)) {
      throw InvalidArgument("fluid region has an empty interior or piece " + std::to_string(i) +
                            " is oriented with the fluid on its right");
    }
  }
}

double FluidRegionSpec::signed_distance(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& piece : pieces_) d = std::min(d, dot(inward_normal(piece), p - piece.a));
  return d;
}

PolylineHit FluidRegionSpec::closest_boundary_point(const Vec2& p) const {
  std::vector<std::array<Vec2, 2>> segments;
  segments.reserve(pieces_.size());
  for (const auto& piece : pieces_) segments.push_back({piece.a, piece.b});
  return closest_point_on_segments(p, segments);
}

double FluidRegionSpec::clipped_area(const std::array<Vec2, 3>& tri, double depth) const {
  // Sutherland-Hodgman against each (shifted) half-plane.
  std::vector<Vec2> poly(tri.begin(), tri.end());
  if (signed_area(tri[0], tri[1], tri[2]) < 0.0) std::reverse(poly.begin(), poly.end());
  std::vector<Vec2> next;
  for (const auto& piece : pieces_) {
    const Vec2 n = inward_normal(piece);
    const auto level = [&](const Vec2& q) { return dot(n, q - piece.a) - depth; };
    next.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2& s = poly[i];
      const Vec2& e = poly[(i + 1) % poly.size()];
      const double ls = level(s);
      const double le = level(e);
      if (ls >= 0.0) next.push_back(s);
      if ((ls >= 0.0) != (le >= 0.0)) next.push_back(s + (ls / (ls - le)) * (e - s));
    }
    poly.swap(next);
    if (poly.size() < 3) return 0.0;
  }
  return polygon_area(poly);
}

FluidRegionSpec horizontal_strip(double x_min, double x_max, double y_bottom, double y_top, bool open_top,
                                 Vec2 bottom_velocity, Vec2 top_velocity) {
  if (!(y_top > y_bottom) || !(x_max > x_min)) throw InvalidArgument("empty fluid strip");
  const double pad = x_max - x_min;
  FluidBoundaryPiece bottom{{x_min - pad, y_bottom}, {x_max + pad, y_bottom}, false, bottom_velocity};
  FluidBoundaryPiece top{{x_max + pad, y_top}, {x_min - pad, y_top}, open_top, top_velocity};
  return FluidRegionSpec({bottom, top});
}

}  // namespace pdm
