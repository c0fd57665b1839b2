#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pdm/geometry.hpp"
#include "pdm/linear_solvers.hpp"
#include "pdm/sparse.hpp"

namespace pdm {

/// The stress is sigma = -p I + 2 rho nu eps(u), so nu acts as a kinematic viscosity.
struct FluidProperties {
  double rho = 1.0;
  double nu = 0.001;
  Vec2 body_force;      // per unit mass
  bool stokes = false;  // drop the convective terms

  void check() const;
};

struct StabilizationParams {
  double tau_mom = 0.0;
  double tau_cont = 0.0;
};

/// tau_mom = [(2/dt)^2 + (2|u|/h)^2 + (4 nu/h^2)^2]^(-1/2), tau_cont = max(h|u|/2, h^2/(4 dt)).
StabilizationParams compute_tau(double h, double speed, double dt, const FluidProperties& props);

/// Geometry of one space-time slab. Coordinates are indexed by mesh node; only the listed
/// (active) elements take part. Both levels share the connectivity.
struct SpaceTimeSlab {
  std::vector<Vec2> x_lower;
  std::vector<Vec2> x_upper;
  std::vector<std::array<int, 3>> elements;
  std::vector<int> element_ids;  // ids in the owning mesh, for diagnostics
  double t_lower = 0.0;
  double dt = 0.0;
  int index = 0;

  void check() const;
};

/// Nodal velocity at both slab levels, pressure (constant in time within the slab), and the
/// upper-level velocity of the previous slab that the jump term pulls towards.
struct FlowState {
  std::vector<Vec2> u_lower;
  std::vector<Vec2> u_upper;
  std::vector<double> p;
  std::vector<Vec2> donor;

  static FlowState zeros(std::size_t nodes);
  std::size_t size() const { return p.size(); }
};

struct FlowDirichletSet {
  std::map<std::pair<int, int>, std::array<double, 2>> velocity;  // (node, component) -> {lower, upper}
  std::optional<int> pressure_pin;                                  // node whose pressure is held at 0

  void set(int node, Vec2 lower, Vec2 upper) {
    velocity[{node, 0}] = {lower.x, upper.x};
    velocity[{node, 1}] = {lower.y, upper.y};
  }
  void set(int node, Vec2 value) { set(node, value, value); }
  void set_component(int node, int component, double lower, double upper) {
    velocity[{node, component}] = {lower, upper};
  }
};

/// Compact numbering of the active nodes: five unknowns per node,
/// (u_lower.x, u_lower.y, u_upper.x, u_upper.y, p).
struct FlowLayout {
  std::vector<int> nodes;     // active node ids, ascending
  std::vector<int> index_of;  // mesh node -> position in `nodes`, or -1

  static FlowLayout from_slab(const SpaceTimeSlab& slab);
  int dofs() const { return 5 * static_cast<int>(nodes.size()); }
  std::vector<double> gather(const FlowState& state) const;
  void scatter(std::span<const double> x, FlowState& state) const;
};

struct SlabAssembly {
  FlowLayout layout;
  std::vector<double> residual;
  CsrMatrix jacobian;  // empty unless requested
};

/// Residual of the stabilized space-time weak form and its exact Jacobian. Dirichlet rows
/// are replaced by (unknown - prescribed value) with identity Jacobian rows.
SlabAssembly assemble_slab(const SpaceTimeSlab& slab, const FlowState& state, const FluidProperties& props,
                           const FlowDirichletSet& bc, bool with_jacobian = true);

struct NewtonConfig {
  double rtol = 1e-8;
  double atol = 1e-12;
  int max_iterations = 25;
  SolverConfig linear;
};

struct SlabSolution {
  FlowState state;
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Full Newton on one slab. Aborts with SolverError when the residual grows three times in a
/// row, when the iteration limit is hit, or when a fully Dirichlet-bounded problem receives
/// velocity data with nonzero net flux.
SlabSolution newton_solve_slab(const SpaceTimeSlab& slab, FlowState initial, const FluidProperties& props,
                               const FlowDirichletSet& bc, const NewtonConfig& cfg = {});

/// Net outflow of the velocity at the given level through the boundary of the active
/// elements (edges with a single active neighbour).
double boundary_flux(const SpaceTimeSlab& slab, const std::vector<Vec2>& u, bool upper);

}  // namespace pdm
