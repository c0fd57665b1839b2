#include "pdm/mesh.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

#include "pdm/errors.hpp"

namespace pdm {

namespace {

constexpr std::array<std::string_view, kBoundaryTagCount> kTagNames = {
    "inflow", "outflow", "wall", "gamma_T", "gamma_PF", "phantom_exterior", "interface_GI",
    "moving_body"};

std::map<Edge, int> edge_counts(const Mesh& mesh) {
  std::map<Edge, int> counts;
  for (const auto& el : mesh.elements) {
    for (int k = 0; k < 3; ++k) {
      ++counts[edge_key(el.nodes[k], el.nodes[(k + 1) % 3])];
    }
  }
  return counts;
}

}  // namespace

std::string_view to_string(BoundaryTag tag) { return kTagNames[static_cast<int>(tag)]; }

std::optional<BoundaryTag> boundary_tag_from_string(std::string_view name) {
  for (int i = 0; i < kBoundaryTagCount; ++i) {
    if (kTagNames[i] == name) return static_cast<BoundaryTag>(i);
  }
  return std::nullopt;
}

std::vector<Vec2> Mesh::coordinates() const {
  std::vector<Vec2> x(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) x[i] = nodes[i].x;
  return x;
}

void Mesh::set_coordinates(const std::vector<Vec2>& x) {
  if (x.size() != nodes.size()) throw InvalidArgument("coordinate count does not match node count");
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].x = x[i];
}

double Mesh::diameter() const {
  if (nodes.empty()) return 0.0;
  Vec2 lo = nodes.front().x;
  Vec2 hi = lo;
  for (const auto& n : nodes) {
    lo.x = std::min(lo.x, n.x.x);
    lo.y = std::min(lo.y, n.x.y);
    hi.x = std::max(hi.x, n.x.x);
    hi.y = std::max(hi.y, n.x.y);
  }
  return distance(lo, hi);
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << inverted_elements.size() << " inverted element(s), " << duplicate_nodes.size()
     << " duplicate node(s), " << non_manifold_edges.size() << " non-manifold edge(s), "
     << dangling_links.size() << " dangling ring link(s)";
  if (!inverted_elements.empty()) {
    os << "; inverted:";
    for (std::size_t i = 0; i < std::min<std::size_t>(inverted_elements.size(), 10); ++i) {
      os << ' ' << inverted_elements[i];
    }
  }
  return os.str();
}

ValidationReport validate(const Mesh& mesh) {
  ValidationReport report;
  const auto n_nodes = static_cast<int>(mesh.nodes.size());

  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& nd = mesh.elements[e].nodes;
    bool in_range = true;
    for (int v : nd) in_range = in_range && v >= 0 && v < n_nodes;
    if (!in_range) {
      report.inverted_elements.push_back(static_cast<int>(e));
      continue;
    }
    const auto [a, b, c] = mesh.element_coords(e);
    if (!(signed_area(a, b, c) > 0.0)) report.inverted_elements.push_back(static_cast<int>(e));
  }

  // Duplicate ids and coincident coordinates.
  std::map<int, int> seen_ids;
  for (int i = 0; i < n_nodes; ++i) {
    auto [it, inserted] = seen_ids.emplace(mesh.nodes[i].id, i);
    if (!inserted) report.duplicate_nodes.emplace_back(it->second, i);
  }
  std::vector<int> order(n_nodes);
  for (int i = 0; i < n_nodes; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Vec2& pa = mesh.nodes[a].x;
    const Vec2& pb = mesh.nodes[b].x;
    return pa.x < pb.x || (pa.x == pb.x && pa.y < pb.y);
  });
  const double tol = 1e-12 * std::max(mesh.diameter(), 1e-300);
  for (int k = 0; k < n_nodes; ++k) {
    for (int m = k + 1; m < n_nodes; ++m) {
      const Vec2& pa = mesh.nodes[order[k]].x;
      const Vec2& pb = mesh.nodes[order[m]].x;
      if (pb.x - pa.x > tol) break;
      if (std::abs(pb.y - pa.y) <= tol) report.duplicate_nodes.emplace_back(order[k], order[m]);
    }
  }

  const auto counts = edge_counts(mesh);
  for (const auto& [edge, count] : counts) {
    if (count > 2) report.non_manifold_edges.push_back(edge);
  }
  for (const auto& be : mesh.boundary_edges) {
    const Edge key = edge_key(be.nodes[0], be.nodes[1]);
    const auto it = counts.find(key);
    const int count = it == counts.end() ? 0 : it->second;
    const bool ok = is_internal_tag(be.tag) ? (count == 1 || count == 2) : count == 1;
    if (!ok) report.non_manifold_edges.push_back(key);
  }

  for (std::size_t i = 0; i < mesh.ring_links.size(); ++i) {
    const auto& link = mesh.ring_links[i];
    bool ok = true;
    for (const Edge& e : {link.bottom, link.top}) {
      const auto it = counts.find(edge_key(e[0], e[1]));
      ok = ok && it != counts.end() && it->second == 1;
    }
    if (!ok) report.dangling_links.push_back(static_cast<int>(i));
  }
  return report;
}

ElementMetric triangle_metric(const Vec2& a, const Vec2& b, const Vec2& c) {
  ElementMetric m;
  m.area = signed_area(a, b, c);
  const double la = distance(b, c);
  const double lb = distance(a, c);
  const double lc = distance(a, b);
  m.h = std::max({la, lb, lc});
  if (m.area > 0.0 && la > 0.0 && lb > 0.0 && lc > 0.0) {
    const double s = 0.5 * (la + lb + lc);
    // 2 r / R with r = A / s and R = la lb lc / (4 A)
    m.quality = 8.0 * m.area * m.area / (s * la * lb * lc);
    m.quality = std::min(m.quality, 1.0);
  }
  return m;
}

std::vector<ElementMetric> element_metrics(const Mesh& mesh) {
  std::vector<ElementMetric> out(mesh.elements.size());
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto [a, b, c] = mesh.element_coords(e);
    out[e] = triangle_metric(a, b, c);
  }
  return out;
}

PolylineHit closest_point_on_segments(const Vec2& p,
                                      const std::vector<std::array<Vec2, 2>>& segments) {
  if (segments.empty()) throw InvalidArgument("closest-point query on an empty polyline");
  PolylineHit best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto proj = project_onto_segment(p, segments[s][0], segments[s][1]);
    const double scale = std::max(1.0, std::max(norm(segments[s][0]), norm(segments[s][1])));
    // Near-ties within rounding keep the earlier segment.
    if (proj.distance < best.distance - 1e-14 * scale) {
      best = {proj.point, static_cast<int>(s), proj.parameter, proj.distance};
    }
  }
  return best;
}

PolylineHit closest_point_on_polyline(const Vec2& p, BoundaryTag tag, const Mesh& mesh) {
  std::vector<std::array<Vec2, 2>> segments;
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag == tag) segments.push_back({mesh.nodes[be.nodes[0]].x, mesh.nodes[be.nodes[1]].x});
  }
  if (segments.empty()) {
    throw InvalidArgument("mesh has no boundary edges tagged " + std::string(to_string(tag)));
  }
  return closest_point_on_segments(p, segments);
}

void refresh_node_tags(Mesh& mesh) {
  for (auto& n : mesh.nodes) {
    TagSet kept;
    if (n.tags.has(BoundaryTag::gamma_T)) kept.add(BoundaryTag::gamma_T);
    if (n.tags.has(BoundaryTag::interface_GI)) kept.add(BoundaryTag::interface_GI);
    n.tags = kept;
  }
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag == BoundaryTag::gamma_T || be.tag == BoundaryTag::interface_GI) continue;
    mesh.nodes[be.nodes[0]].tags.add(be.tag);
    mesh.nodes[be.nodes[1]].tags.add(be.tag);
  }
}

std::vector<std::vector<int>> node_to_elements(const Mesh& mesh) {
  std::vector<std::vector<int>> adj(mesh.nodes.size());
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    for (int v : mesh.elements[e].nodes) adj[v].push_back(static_cast<int>(e));
  }
  return adj;
}

}  // namespace pdm
