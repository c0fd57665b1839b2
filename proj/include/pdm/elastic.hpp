#pragma once

#include <map>
#include <optional>
#include <vector>

#include "pdm/linear_solvers.hpp"
#include "pdm/mesh.hpp"
#include "pdm/sparse.hpp"

namespace pdm {

/// Plane-strain moduli of the pseudo-solid used to move the mesh. Only their ratio matters.
struct ElasticityParams {
  double lambda = 1.0;
  double mu = 1.0;
  /// Element stiffness is scaled by (reference_area / area)^stiffening_exponent.
  double stiffening_exponent = 0.0;
  /// Defaults to the mean element area of the mesh being assembled.
  std::optional<double> reference_area;

  void check() const;
};

struct MeshDirichletSet {
  std::map<int, Vec2> prescribed;  // node -> displacement
  std::map<int, int> axis;         // node -> component held at zero, the other is free

  void prescribe(int node, Vec2 g) { prescribed[node] = g; }
  void constrain_axis(int node, int component) { axis[node] = component; }
  void check(const Mesh& mesh) const;
};

using DisplacementField = std::vector<Vec2>;

/// 6x6 element stiffness for dof order (x0, y0, x1, y1, x2, y2), unscaled.
std::array<std::array<double, 6>, 6> element_stiffness(const std::array<Vec2, 3>& x, double lambda, double mu);

/// Global stiffness with dof 2*node + component. The returned system carries the
/// constraints but has not had them applied, so the matrix is the raw stiffness.
SparseSystem assemble_elasticity(const Mesh& mesh, const ElasticityParams& params, const MeshDirichletSet& bc);

DisplacementField solve_mesh_displacement(const SparseSystem& system, const SolverConfig& cfg = {});

struct DisplacedMesh {
  Mesh mesh;
  ValidationReport report;
};

/// Moves every node by its displacement and re-validates. Inverted elements are reported,
/// the displacement is applied regardless.
DisplacedMesh apply_displacement(Mesh mesh, const DisplacementField& d);

}  // namespace pdm
