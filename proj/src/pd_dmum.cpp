#include "pdm/pd_dmum.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "pdm/errors.hpp"

namespace pdm {

std::string_view to_string(UpdateMethod m) { return m == UpdateMethod::pd_dmum ? "pd_dmum" : "emum_only"; }

UpdateMethod update_method_from_string(std::string_view name) {
  if (name == "pd_dmum") return UpdateMethod::pd_dmum;
  if (name == "emum_only") return UpdateMethod::emum_only;
  throw InvalidArgument("unknown update method '" + std::string(name) + "'");
}

void MeshUpdateConfig::check() const {
  elasticity.check();
  solver.check();
  if (activation_depth < 0.0 || activation_depth >= 1.0) throw InvalidArgument("activation depth must be in [0, 1)");
  if (ring_rows < 0) throw InvalidArgument("ring_rows must be non-negative");
}

double min_active_quality(const Mesh& mesh, const ActivityPattern& pattern) {
  double q = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    if (!pattern.active[e]) continue;
    const auto x = mesh.element_coords(e);
    q = std::min(q, triangle_metric(x[0], x[1], x[2]).quality);
  }
  return q;
}

namespace {

ActivityPattern all_active(const Mesh& mesh, int epoch) {
  return {std::vector<char>(mesh.elements.size(), 1), epoch};
}

std::vector<int> inverted(const Mesh& mesh, const ActivityPattern* only) {
  std::vector<int> bad;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    if (only && !only->active[e]) continue;
    const auto x = mesh.element_coords(e);
    if (!(signed_area(x[0], x[1], x[2]) > 0.0)) bad.push_back(static_cast<int>(e));
  }
  return bad;
}

Mesh with_coordinates(Mesh mesh, const std::vector<Vec2>& x) {
  mesh.set_coordinates(x);
  return mesh;
}

}  // namespace

MeshUpdater::MeshUpdater(Mesh mesh, std::optional<FluidRegionSpec> region, MeshUpdateConfig cfg)
    : mesh_(std::move(mesh)), region_(std::move(region)), cfg_(std::move(cfg)) {
  cfg_.check();
  if (cfg_.method == UpdateMethod::pd_dmum && !region_) throw InvalidArgument("pd_dmum needs a fluid region");
  if (cfg_.ring_rows > 0 && (!mesh_.ring || mesh_.ring_links.empty())) {
    throw UnsupportedOperation("ring recycling needs a mesh with a virtual ring");
  }
  if (const auto bad = inverted(mesh_, nullptr); !bad.empty()) {
    throw InvalidArgument("initial mesh has " + std::to_string(bad.size()) + " inverted element(s)");
  }
  base_ = mesh_.coordinates();
  if (cfg_.method == UpdateMethod::emum_only) {
    pattern_ = all_active(mesh_, 0);
    return;
  }
  pattern_ = classify_activity(mesh_, *region_, cfg_.activation_depth, 0);
  if (pattern_.count() == 0) throw StepRejected("no element intersects the fluid region", {});
  MeshUpdate stats;
  iface_ = conform(mesh_, pattern_, stats);
}

// Closest-point projection alone fails where the interface steps from one node row to the
// next: an active element with all three nodes on the interface lands flat on the boundary,
// and a step edge across the boundary has both ends projected onto the same point. Flat
// elements leave the pattern (they add no area to the fluid); a collapsed or folded step is
// opened by sliding one end halfway towards its other interface neighbour along the boundary.
InterfaceSet MeshUpdater::conform(Mesh& upper, ActivityPattern& pattern, MeshUpdate& stats) const {
  constexpr double kFlat = 1e-6;
  const auto& region = *region_;
  for (std::size_t round = 0; round <= upper.elements.size(); ++round) {
    InterfaceSet iface = extract_interface(upper, pattern);
    const auto d = closest_point_displacement(upper, iface, region);
    const auto x = upper.coordinates();
    auto moved = x;
    std::vector<char> snapped(x.size(), 0);
    for (int v : iface.nodes) {
      moved[v] += d[v];
      snapped[v] = 1;
    }

    std::vector<int> flat, collapsed;
    for (std::size_t e = 0; e < upper.elements.size(); ++e) {
      if (!pattern.active[e]) continue;
      const auto& nd = upper.elements[e].nodes;
      const double before = signed_area(x[nd[0]], x[nd[1]], x[nd[2]]);
      const double after = signed_area(moved[nd[0]], moved[nd[1]], moved[nd[2]]);
      if (after > kFlat * before) continue;
      const double h = triangle_metric(x[nd[0]], x[nd[1]], x[nd[2]]).h;
      const auto on_boundary = [&](int v) {
        return snapped[v] || distance(region.closest_boundary_point(moved[v]).point, moved[v]) <= 1e-12 * h;
      };
      const bool all = on_boundary(nd[0]) && on_boundary(nd[1]) && on_boundary(nd[2]);
      (all ? flat : collapsed).push_back(static_cast<int>(e));
    }
    if (!flat.empty()) {
      for (int e : flat) pattern.active[e] = 0;
      stats.flattened += static_cast<int>(flat.size());
      if (pattern.count() == 0) throw StepRejected("interface correction removed every active element", {});
      continue;
    }

    if (!collapsed.empty()) {
      std::vector<int> active_count(x.size(), 0);
      for (std::size_t e = 0; e < upper.elements.size(); ++e) {
        if (!pattern.active[e]) continue;
        for (int v : upper.elements[e].nodes) ++active_count[v];
      }
      std::map<int, std::vector<int>> along;
      for (const auto& [a, b] : iface.edges) {
        along[a].push_back(b);
        along[b].push_back(a);
      }
      for (int e : collapsed) {
        const auto& nd = upper.elements[e].nodes;
        const double h = triangle_metric(x[nd[0]], x[nd[1]], x[nd[2]]).h;
        for (int k = 0; k < 3; ++k) {
          int u = nd[k];
          int v = nd[(k + 1) % 3];
          if (!snapped[u] || !snapped[v]) continue;
          const auto farther = [&](int a, int b) { return distance(x[a], moved[a]) > distance(x[b], moved[b]); };
          if (active_count[v] < active_count[u] || (active_count[v] == active_count[u] && farther(v, u))) {
            std::swap(u, v);
          }
          // u slides; v stays on its closest point.
          int target = -1;
          for (int n : along[u]) {
            if (n == v || distance(moved[n], moved[u]) <= 1e-9 * h) continue;
            if (target < 0 || distance(moved[n], moved[u]) < distance(moved[target], moved[u])) target = n;
          }
          if (target < 0) continue;
          moved[u] = region.closest_boundary_point(0.5 * (moved[u] + moved[target])).point;
          ++stats.slid;
          break;
        }
      }
    }

    std::set<int> offending;
    for (std::size_t e = 0; e < upper.elements.size(); ++e) {
      if (!pattern.active[e]) continue;
      const auto& nd = upper.elements[e].nodes;
      if (signed_area(moved[nd[0]], moved[nd[1]], moved[nd[2]]) > 0.0) continue;
      for (int v : nd) {
        if (snapped[v]) offending.insert(v);
      }
    }
    if (!offending.empty()) {
      throw StepRejected("interface correction would invert elements around " + std::to_string(offending.size()) +
                             " node(s)",
                         std::vector<int>(offending.begin(), offending.end()));
    }
    upper.set_coordinates(moved);
    return iface;
  }
  throw StepRejected("interface correction did not settle", {});
}

MeshDirichletSet MeshUpdater::complete(const MeshDirichletSet& motion) const {
  MeshDirichletSet bc = motion;
  for (const auto& n : mesh_.nodes) {
    if (bc.prescribed.count(n.id) || bc.axis.count(n.id)) continue;
    if (n.motion == MotionClass::fixed || n.motion == MotionClass::prescribed) bc.prescribe(n.id, {});
    if (n.motion == MotionClass::axis_constrained) bc.constrain_axis(n.id, n.constrained_component);
  }
  return bc;
}

FlowDirichletSet MeshUpdater::interface_values(const InterfaceSet& iface) const {
  FlowDirichletSet bc;
  if (!region_) return bc;
  const auto& pieces = region_->pieces();
  for (const auto& edge : iface.edges) {
    for (int v : edge) {
      const auto hit = region_->closest_boundary_point(mesh_.nodes[v].x);
      const auto& piece = pieces[hit.segment];
      if (!piece.open) bc.set(v, piece.wall_velocity);
    }
  }
  return bc;
}

MeshUpdate MeshUpdater::current() const {
  MeshUpdate u;
  u.x_lower = mesh_.coordinates();
  u.pattern = pattern_;
  u.iface = iface_;
  u.interface_bc = interface_values(iface_);
  return u;
}

// Counts fully inactive element rows from either exterior and asks for one row to travel
// from the thicker strip to the one that has fallen below its target thickness.
int MeshUpdater::ring_shift_needed() const {
  if (cfg_.method != UpdateMethod::pd_dmum || cfg_.ring_rows == 0) return 0;
  const auto& rows = mesh_.ring->elem_rows;
  const auto inactive_row = [&](const std::vector<int>& row) {
    return !row.empty() && std::none_of(row.begin(), row.end(), [&](int e) { return pattern_.active[e]; });
  };
  int bottom = 0;
  while (bottom < static_cast<int>(rows.size()) && inactive_row(rows[bottom])) ++bottom;
  int top = 0;
  while (top < static_cast<int>(rows.size()) && inactive_row(rows[rows.size() - 1 - top])) ++top;
  if (top < cfg_.ring_rows && bottom > cfg_.ring_rows) return -1;
  if (bottom < cfg_.ring_rows && top > cfg_.ring_rows) return 1;
  return 0;
}

MeshUpdate MeshUpdater::step(const MeshDirichletSet& motion, FlowState& state, int epoch) {
  if (state.size() != mesh_.nodes.size()) throw InvalidArgument("flow state does not match the mesh");
  MeshUpdate out;

  Mesh current = mesh_;
  std::vector<Vec2> base = base_;
  out.ring_shift = ring_shift_needed();
  if (out.ring_shift != 0) {
    base = apply_ring_shift(with_coordinates(mesh_, base_), out.ring_shift).coordinates();
    current = apply_ring_shift(std::move(current), out.ring_shift);
  }
  out.x_lower = current.coordinates();

  // Elastic update, on the uncorrected configuration in pd_dmum mode.
  const Mesh elastic = cfg_.method == UpdateMethod::pd_dmum ? with_coordinates(current, base) : current;
  const auto bc = complete(motion);
  const auto system = assemble_elasticity(elastic, cfg_.elasticity, bc);
  const auto d = solve_mesh_displacement(system, cfg_.solver);
  for (std::size_t v = 0; v < base.size(); ++v) base[v] += d[v];
  Mesh upper = with_coordinates(current, base);

  if (cfg_.method == UpdateMethod::emum_only) {
    if (auto bad = inverted(upper, nullptr); !bad.empty()) {
      const auto what = "mesh update inverts " + std::to_string(bad.size()) + " element(s)";
      throw StepRejected(what, std::move(bad));
    }
    out.pattern = all_active(upper, epoch);
    mesh_ = std::move(upper);
    base_ = std::move(base);
    pattern_ = out.pattern;
    return out;
  }

  out.pattern = classify_activity(upper, *region_, cfg_.activation_depth, epoch);
  if (out.pattern.count() == 0) throw StepRejected("no element intersects the fluid region", {});
  // Phantom elements must stay valid too: the next elastic solve runs on this configuration.
  if (auto bad = inverted(upper, nullptr); !bad.empty()) {
    const auto what = "mesh update inverts " + std::to_string(bad.size()) + " element(s)";
    throw StepRejected(what, std::move(bad));
  }
  out.iface = conform(upper, out.pattern, out);

  const auto positions = upper.coordinates();
  out.projection = build_projection_records(pattern_, out.pattern, current, &positions);
  for (std::size_t e = 0; e < pattern_.active.size(); ++e) {
    if (pattern_.active[e] && !out.pattern.active[e]) ++out.deactivated;
  }

  FlowState projected = state;
  for (const auto& [node, donor] : out.projection.donors) {
    Vec2 u;
    double p = 0.0;
    for (int k = 0; k < 3; ++k) {
      u += donor.weights[k] * state.u_upper[donor.nodes[k]];
      p += donor.weights[k] * state.p[donor.nodes[k]];
    }
    projected.u_lower[node] = projected.u_upper[node] = projected.donor[node] = u;
    projected.p[node] = p;
  }

  mesh_ = std::move(upper);
  base_ = std::move(base);
  pattern_ = out.pattern;
  iface_ = out.iface;
  state = std::move(projected);
  out.interface_bc = interface_values(iface_);
  return out;
}

}  // namespace pdm
