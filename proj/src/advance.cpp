#include "pdm/advance.hpp"

#include <cmath>
#include <string>

#include "pdm/errors.hpp"

namespace pdm {

TimeGrid TimeGrid::until(double end, double dt, double t0) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const double count = (end - t0) / dt;
  const double slabs = std::round(count);
  if (!(slabs >= 1.0) || std::abs(count - slabs) > 1e-12 * std::max(1.0, slabs)) {
    throw InvalidArgument("time step " + std::to_string(dt) + " does not divide the interval up to " +
                          std::to_string(end));
  }
  TimeGrid g{t0, dt, static_cast<int>(slabs)};
  g.check();
  return g;
}

void TimeGrid::check() const {
  if (!(dt > 0.0) || !std::isfinite(t0)) throw InvalidArgument("invalid time grid");
  if (slabs < 0) throw InvalidArgument("negative slab count");
}

SpaceTimeSlab make_slab(const MeshUpdate& update, const Mesh& upper, double t_lower, double dt, int index) {
  SpaceTimeSlab slab;
  slab.x_lower = update.x_lower;
  slab.x_upper = upper.coordinates();
  for (std::size_t e = 0; e < upper.elements.size(); ++e) {
    if (!update.pattern.active[e]) continue;
    slab.elements.push_back(upper.elements[e].nodes);
    slab.element_ids.push_back(static_cast<int>(e));
  }
  slab.t_lower = t_lower;
  slab.dt = dt;
  slab.index = index;
  return slab;
}

namespace {

FlowDirichletSet merge(const FlowDirichletSet& iface, const FlowDirichletSet& cases, const std::vector<char>& active) {
  FlowDirichletSet bc;
  for (const auto* src : {&iface, &cases}) {
    for (const auto& [key, g] : src->velocity) {
      if (key.first >= 0 && key.first < static_cast<int>(active.size()) && active[key.first]) bc.velocity[key] = g;
    }
  }
  bc.pressure_pin = cases.pressure_pin;
  if (bc.pressure_pin && !active.at(*bc.pressure_pin)) throw InvalidArgument("pressure pin on an inactive node");
  return bc;
}

}  // namespace

void advance(const TimeGrid& grid, MeshUpdater& updater, FlowState& state, const FluidProperties& props,
             const MotionScript& motion, const FlowBoundaryFactory& boundary, const NewtonConfig& newton,
             const SlabObserver& observe) {
  grid.check();
  props.check();
  for (int n = 0; n < grid.slabs; ++n) {
    const double t_lo = grid.time(n);
    const double t_hi = grid.time(n + 1);
    try {
      const auto update = updater.step(motion(updater.mesh(), t_lo, t_hi), state, n + 1);
      const Mesh& mesh = updater.mesh();
      const auto slab = make_slab(update, mesh, t_lo, grid.dt, n);

      std::vector<char> active(mesh.nodes.size(), 0);
      for (const auto& el : slab.elements) {
        for (int v : el) active[v] = 1;
      }
      const auto bc = merge(update.interface_bc, boundary(mesh, update, t_lo, t_hi), active);
      auto solution = newton_solve_slab(slab, state, props, bc, newton);

      state = std::move(solution.state);
      state.donor = state.u_upper;
      state.u_lower = state.u_upper;

      SlabRecord rec;
      rec.slab = n;
      rec.t_lower = t_lo;
      rec.t_upper = t_hi;
      rec.newton_iterations = solution.iterations;
      rec.newton_residual = solution.residual_history.empty() ? 0.0 : solution.residual_history.back();
      rec.active_elements = update.pattern.count();
      rec.newly_activated = static_cast<int>(update.projection.newly_activated.size());
      rec.deactivated = update.deactivated;
      rec.projected_nodes = static_cast<int>(update.projection.donors.size());
      rec.projection_fallbacks = update.projection.fallbacks;
      rec.ring_shift = update.ring_shift;
      rec.min_quality = min_active_quality(mesh, update.pattern);
      if (observe) observe(rec, updater, update, state);
    } catch (const SimulationHalted&) {
      throw;
    } catch (const std::exception& e) {
      throw SimulationHalted("slab " + std::to_string(n) + " (t = " + std::to_string(t_lo) + "): " + e.what(), n);
    }
  }
}

}  // namespace pdm
