#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "pdm/elastic.hpp"
#include "pdm/flow.hpp"
#include "pdm/phantom.hpp"

namespace pdm {

enum class UpdateMethod { pd_dmum, emum_only };

std::string_view to_string(UpdateMethod m);
UpdateMethod update_method_from_string(std::string_view name);

struct MeshUpdateConfig {
  UpdateMethod method = UpdateMethod::pd_dmum;
  ElasticityParams elasticity;
  SolverConfig solver;
  /// Elements need a part at least this fraction of their smallest altitude inside the fluid
  /// region to be active. Keeps slivers that the closest-point correction would flatten out.
  double activation_depth = 0.5;
  /// Target thickness of each phantom strip in element rows; 0 disables ring recycling.
  int ring_rows = 0;

  void check() const;
};

/// What one mesh update hands to the flow solver.
struct MeshUpdate {
  std::vector<Vec2> x_lower;  // configuration at the start of the slab, per node
  ActivityPattern pattern;
  InterfaceSet iface;
  ProjectionRecord projection;
  FlowDirichletSet interface_bc;  // wall velocities on interface nodes
  int ring_shift = 0;
  int deactivated = 0;
  int flattened = 0;  // elements dropped because the correction would flatten them
  int slid = 0;       // interface nodes moved along the boundary to open a collapsed step
};

/// Owns the moving mesh. In pd_dmum mode it keeps the elastic base configuration apart from
/// the interface-corrected one, so the closest-point correction never accumulates.
class MeshUpdater {
 public:
  /// Classifies and conforms the initial mesh. emum_only treats every element as fluid.
  MeshUpdater(Mesh mesh, std::optional<FluidRegionSpec> region, MeshUpdateConfig cfg);

  const Mesh& mesh() const { return mesh_; }
  const std::vector<Vec2>& base() const { return base_; }
  const ActivityPattern& pattern() const { return pattern_; }
  const InterfaceSet& interface_set() const { return iface_; }
  const std::optional<FluidRegionSpec>& region() const { return region_; }
  const MeshUpdateConfig& config() const { return cfg_; }

  /// Active elements and flow boundary values on the current mesh, without moving anything.
  MeshUpdate current() const;

  /// Moves prescribed nodes by `motion` (increments for this step; fixed and axis-constrained
  /// nodes are added from the node motion classes) and updates activity, interface, and
  /// projected state. `state` gains interpolated values on newly activated nodes. On
  /// StepRejected the updater and `state` are unchanged.
  MeshUpdate step(const MeshDirichletSet& motion, FlowState& state, int epoch);

 private:
  MeshDirichletSet complete(const MeshDirichletSet& motion) const;
  InterfaceSet conform(Mesh& upper, ActivityPattern& pattern, MeshUpdate& stats) const;
  FlowDirichletSet interface_values(const InterfaceSet& iface) const;
  int ring_shift_needed() const;

  Mesh mesh_;
  std::vector<Vec2> base_;
  std::optional<FluidRegionSpec> region_;
  MeshUpdateConfig cfg_;
  ActivityPattern pattern_;
  InterfaceSet iface_;
};

/// Smallest element quality over the active elements.
double min_active_quality(const Mesh& mesh, const ActivityPattern& pattern);

}  // namespace pdm
