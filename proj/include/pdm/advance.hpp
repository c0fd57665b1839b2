#pragma once

#include <functional>
#include <vector>

#include "pdm/flow.hpp"
#include "pdm/pd_dmum.hpp"

namespace pdm {

struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  int slabs = 0;

  /// Throws unless dt divides (end - t0) within 1e-12 relative.
  static TimeGrid until(double end, double dt, double t0 = 0.0);
  double time(int n) const { return t0 + n * dt; }
  void check() const;
};

struct SlabRecord {
  int slab = 0;
  double t_lower = 0.0;
  double t_upper = 0.0;
  int newton_iterations = 0;
  double newton_residual = 0.0;
  int active_elements = 0;
  int newly_activated = 0;
  int deactivated = 0;
  int projected_nodes = 0;
  int projection_fallbacks = 0;
  int ring_shift = 0;
  double min_quality = 0.0;  // over active elements at the upper level
};

/// Boundary displacement increments of the mesh for the slab [t_lower, t_upper].
using MotionScript = std::function<MeshDirichletSet(const Mesh& mesh, double t_lower, double t_upper)>;

/// Case boundary values for the slab. They override the interface wall values node by node
/// and component by component; entries on inactive nodes are ignored.
using FlowBoundaryFactory =
    std::function<FlowDirichletSet(const Mesh& mesh, const MeshUpdate& update, double t_lower, double t_upper)>;

using SlabObserver =
    std::function<void(const SlabRecord& record, const MeshUpdater& updater, const MeshUpdate& update,
                       const FlowState& state)>;

SpaceTimeSlab make_slab(const MeshUpdate& update, const Mesh& upper, double t_lower, double dt, int index);

/// Runs the slabs of `grid` in order: mesh update, flow solve, observer. `state` holds the
/// initial condition on entry (lower and upper levels equal) and the last solution on exit.
/// Any failure is rethrown as SimulationHalted carrying the slab index.
void advance(const TimeGrid& grid, MeshUpdater& updater, FlowState& state, const FluidProperties& props,
             const MotionScript& motion, const FlowBoundaryFactory& boundary, const NewtonConfig& newton,
             const SlabObserver& observe);

}  // namespace pdm
