#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "pdm/errors.hpp"
#include "pdm/phantom.hpp"

namespace pdm {

int ActivityPattern::count() const {
  return static_cast<int>(std::count(active.begin(), active.end(), char{1}));
}

ActivityPattern classify_activity(const Mesh& mesh_upper, const FluidRegionSpec& spec, double depth_fraction,
                                  int epoch) {
  if (depth_fraction < 0.0 || depth_fraction >= 1.0) throw InvalidArgument("activation depth fraction must be in [0, 1)");
  ActivityPattern pattern;
  pattern.epoch = epoch;
  pattern.active.assign(mesh_upper.elements.size(), 0);
  for (std::size_t e = 0; e < mesh_upper.elements.size(); ++e) {
    const auto tri = mesh_upper.element_coords(e);
    const auto m = triangle_metric(tri[0], tri[1], tri[2]);
    const double area = std::abs(m.area);
    if (!(m.h > 0.0)) continue;
    const double depth = depth_fraction * 2.0 * area / m.h;
    pattern.active[e] = spec.clipped_area(tri, depth) > 1e-10 * area ? 1 : 0;
  }
  return pattern;
}

InterfaceSet extract_interface(Mesh& mesh, const ActivityPattern& pattern) {
  if (pattern.active.size() != mesh.elements.size()) throw InvalidArgument("activity pattern does not match mesh");
  // Per edge: bit 0 = has active neighbour, bit 1 = has inactive neighbour.
  std::map<Edge, int> sides;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& nd = mesh.elements[e].nodes;
    const int bit = pattern.active[e] ? 1 : 2;
    for (int k = 0; k < 3; ++k) sides[edge_key(nd[k], nd[(k + 1) % 3])] |= bit;
  }
  InterfaceSet iface;
  std::set<int> nodes;
  for (const auto& [edge, bits] : sides) {
    if (bits != 3) continue;
    iface.edges.push_back(edge);
    for (int v : edge) {
      if (mesh.nodes[v].motion != MotionClass::fixed) nodes.insert(v);
    }
  }
  iface.nodes.assign(nodes.begin(), nodes.end());
  for (auto& n : mesh.nodes) n.tags.remove(BoundaryTag::interface_GI);
  for (int v : iface.nodes) mesh.nodes[v].tags.add(BoundaryTag::interface_GI);
  return iface;
}

DisplacementField closest_point_displacement(const Mesh& mesh, const InterfaceSet& iface, const FluidRegionSpec& spec) {
  DisplacementField d(mesh.nodes.size());
  for (int v : iface.nodes) d[v] = spec.closest_boundary_point(mesh.nodes[v].x).point - mesh.nodes[v].x;
  return d;
}

DisplacementField conform_interface(const Mesh& mesh, const InterfaceSet& iface, const FluidRegionSpec& spec) {
  const auto d = closest_point_displacement(mesh, iface, spec);
  std::vector<Vec2> moved = mesh.coordinates();
  for (int v : iface.nodes) moved[v] += d[v];
  std::vector<char> touched(mesh.nodes.size(), 0);
  for (int v : iface.nodes) touched[v] = 1;
  std::set<int> offending;
  for (const auto& el : mesh.elements) {
    const auto& nd = el.nodes;
    if (!touched[nd[0]] && !touched[nd[1]] && !touched[nd[2]]) continue;
    if (signed_area(moved[nd[0]], moved[nd[1]], moved[nd[2]]) > 0.0) continue;
    for (int v : nd) {
      if (touched[v]) offending.insert(v);
    }
  }
  if (!offending.empty()) {
    throw StepRejected("interface correction would invert " + std::to_string(offending.size()) +
                           " node neighbourhood(s)",
                       std::vector<int>(offending.begin(), offending.end()));
  }
  return d;
}

namespace {

// Uniform bucket grid over element bounding boxes.
class ElementLocator {
 public:
  ElementLocator(const Mesh& mesh, std::vector<int> elements) : mesh_(mesh), elements_(std::move(elements)) {
    if (elements_.empty()) return;
    lo_ = hi_ = mesh.nodes[mesh.elements[elements_[0]].nodes[0]].x;
    for (int e : elements_) {
      for (int v : mesh.elements[e].nodes) {
        const Vec2& p = mesh.nodes[v].x;
        lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
        hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y)};
      }
    }
    const int n = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(elements_.size()))));
    nx_ = std::max(1, n);
    ny_ = std::max(1, n);
    cell_ = {std::max((hi_.x - lo_.x) / nx_, 1e-300), std::max((hi_.y - lo_.y) / ny_, 1e-300)};
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (int e : elements_) {
      const auto x = mesh.element_coords(e);
      const Vec2 a{std::min({x[0].x, x[1].x, x[2].x}), std::min({x[0].y, x[1].y, x[2].y})};
      const Vec2 b{std::max({x[0].x, x[1].x, x[2].x}), std::max({x[0].y, x[1].y, x[2].y})};
      const auto [i0, j0] = cell_of(a);
      const auto [i1, j1] = cell_of(b);
      for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(e);
      }
    }
  }

  // Element whose smallest barycentric coordinate at p is largest, with that coordinate.
  std::pair<int, std::array<double, 3>> locate(const Vec2& p) const {
    int best = -1;
    std::array<double, 3> best_w{};
    double best_min = -std::numeric_limits<double>::infinity();
    if (elements_.empty()) return {best, best_w};
    const auto [i, j] = cell_of(p);
    for (int e : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
      const auto x = mesh_.element_coords(e);
      const auto w = barycentric(p, x[0], x[1], x[2]);
      const double m = std::min({w[0], w[1], w[2]});
      if (m > best_min) {
        best_min = m;
        best = e;
        best_w = w;
      }
    }
    return {best, best_w};
  }

 private:
  std::pair<int, int> cell_of(const Vec2& p) const {
    const int i = std::clamp(static_cast<int>(std::floor((p.x - lo_.x) / cell_.x)), 0, nx_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p.y - lo_.y) / cell_.y)), 0, ny_ - 1);
    return {i, j};
  }

  const Mesh& mesh_;
  std::vector<int> elements_;
  Vec2 lo_, hi_, cell_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace

ProjectionRecord build_projection_records(const ActivityPattern& pattern_old, const ActivityPattern& pattern_new,
                                          const Mesh& mesh_old, const std::vector<Vec2>* positions) {
  const std::size_t ne = mesh_old.elements.size();
  if (pattern_old.active.size() != ne || pattern_new.active.size() != ne) {
    throw InvalidArgument("activity patterns do not match the mesh");
  }
  if (positions && positions->size() != mesh_old.nodes.size()) throw InvalidArgument("position count mismatch");

  ProjectionRecord rec;
  std::vector<char> has_data(mesh_old.nodes.size(), 0);
  std::vector<int> old_active;
  for (std::size_t e = 0; e < ne; ++e) {
    if (pattern_new.active[e] && !pattern_old.active[e]) rec.newly_activated.push_back(static_cast<int>(e));
    if (pattern_old.active[e]) {
      old_active.push_back(static_cast<int>(e));
      for (int v : mesh_old.elements[e].nodes) has_data[v] = 1;
    }
  }
  if (rec.newly_activated.empty()) return rec;

  std::vector<int> old_nodes;
  for (std::size_t v = 0; v < has_data.size(); ++v) {
    if (has_data[v]) old_nodes.push_back(static_cast<int>(v));
  }
  const ElementLocator locator(mesh_old, old_active);
  constexpr double kInsideTol = 1e-9;

  for (int e : rec.newly_activated) {
    for (int v : mesh_old.elements[e].nodes) {
      if (has_data[v] || rec.donors.count(v)) continue;
      const Vec2 p = positions ? (*positions)[v] : mesh_old.nodes[v].x;
      Donor donor;
      const auto [elem, w] = locator.locate(p);
      if (elem >= 0 && std::min({w[0], w[1], w[2]}) >= -kInsideTol) {
        donor.element = elem;
        donor.nodes = mesh_old.elements[elem].nodes;
        double sum = 0.0;
        for (int k = 0; k < 3; ++k) sum += donor.weights[k] = std::max(w[k], 0.0);
        for (double& wk : donor.weights) wk /= sum;
      } else {
        int nearest = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int u : old_nodes) {
          const double dist = distance(mesh_old.nodes[u].x, p);
          if (dist < best) {
            best = dist;
            nearest = u;
          }
        }
        if (nearest < 0) continue;  // nothing to project from
        donor.nodes = {nearest, nearest, nearest};
        donor.weights = {1.0, 0.0, 0.0};
        ++rec.fallbacks;
      }
      rec.donors.emplace(v, donor);
    }
  }
  return rec;
}

}  // namespace pdm
