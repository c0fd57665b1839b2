#pragma once

#include <array>
#include <cmath>

namespace pdm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

/// Signed area, positive for counterclockwise vertex order.
constexpr double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * cross(b - a, c - a);
}

constexpr Vec2 centroid(const Vec2& a, const Vec2& b, const Vec2& c) {
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

/// Barycentric coordinates of p with respect to triangle (a, b, c).
/// Undefined for degenerate triangles.
inline std::array<double, 3> barycentric(const Vec2& p, const Vec2& a, const Vec2& b,
                                         const Vec2& c) {
  const double area = signed_area(a, b, c);
  const double l0 = signed_area(p, b, c) / area;
  const double l1 = signed_area(a, p, c) / area;
  return {l0, l1, 1.0 - l0 - l1};
}

struct SegmentProjection {
  Vec2 point;
  double parameter = 0.0;  // in [0, 1] along a -> b
  double distance = 0.0;
};

inline SegmentProjection project_onto_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  Vec2 q = a + t * ab;
  if (t == 0.0) q = a;
  if (t == 1.0) q = b;
  if (t > 0.0 && t < 1.0) {
    // Foot of the perpendicular taken from p, so points on the segment map to themselves.
    const double off = cross(ab, p - a) / len2;
    q = p - off * Vec2{-ab.y, ab.x};
  }
  return {q, t, distance(p, q)};
}

}  // namespace pdm
