#include "pdm/elastic.hpp"

#include <cmath>
#include <string>

#include "pdm/errors.hpp"

namespace pdm {

void ElasticityParams::check() const {
  if (!(mu > 0.0)) throw InvalidArgument("elasticity: mu must be positive");
  if (!(lambda >= 0.0)) throw InvalidArgument("elasticity: lambda must be non-negative");
  if (!(stiffening_exponent >= 0.0)) throw InvalidArgument("elasticity: stiffening exponent must be >= 0");
  if (reference_area && !(*reference_area > 0.0)) throw InvalidArgument("elasticity: reference area must be positive");
}

void MeshDirichletSet::check(const Mesh& mesh) const {
  const int n = static_cast<int>(mesh.nodes.size());
  for (const auto& [node, g] : prescribed) {
    if (node < 0 || node >= n) throw InvalidArgument("mesh BC on unknown node " + std::to_string(node));
    if (!std::isfinite(g.x) || !std::isfinite(g.y)) throw InvalidArgument("non-finite mesh BC value");
    if (axis.count(node)) throw InvalidArgument("node " + std::to_string(node) + " is both prescribed and axis-constrained");
  }
  for (const auto& [node, c] : axis) {
    if (node < 0 || node >= n) throw InvalidArgument("mesh BC on unknown node " + std::to_string(node));
    if (c != 0 && c != 1) throw InvalidArgument("axis constraint component must be 0 or 1");
  }
}

std::array<std::array<double, 6>, 6> element_stiffness(const std::array<Vec2, 3>& x, double lambda, double mu) {
  const double area = signed_area(x[0], x[1], x[2]);
  // Gradients of the barycentric shape functions.
  std::array<double, 3> bx{}, by{};
  for (int a = 0; a < 3; ++a) {
    const Vec2& p = x[(a + 1) % 3];
    const Vec2& q = x[(a + 2) % 3];
    bx[a] = (p.y - q.y) / (2.0 * area);
    by[a] = (q.x - p.x) / (2.0 * area);
  }
  std::array<std::array<double, 6>, 6> k{};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      k[2 * a][2 * b] = area * ((lambda + 2 * mu) * bx[a] * bx[b] + mu * by[a] * by[b]);
      k[2 * a][2 * b + 1] = area * (lambda * bx[a] * by[b] + mu * by[a] * bx[b]);
      k[2 * a + 1][2 * b] = area * (lambda * by[a] * bx[b] + mu * bx[a] * by[b]);
      k[2 * a + 1][2 * b + 1] = area * ((lambda + 2 * mu) * by[a] * by[b] + mu * bx[a] * bx[b]);
    }
  }
  return k;
}

SparseSystem assemble_elasticity(const Mesh& mesh, const ElasticityParams& params, const MeshDirichletSet& bc) {
  params.check();
  bc.check(mesh);
  const int n = static_cast<int>(mesh.nodes.size());
  const double eps_area = 1e-14 * mesh.diameter() * mesh.diameter();

  std::vector<double> areas(mesh.elements.size());
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto x = mesh.element_coords(e);
    areas[e] = signed_area(x[0], x[1], x[2]);
    if (!(areas[e] > eps_area)) {
      throw AssemblyError("degenerate or inverted element " + std::to_string(e) + " in mesh elasticity",
                          static_cast<int>(e));
    }
    total += areas[e];
  }
  const double ref_area = params.reference_area.value_or(mesh.elements.empty() ? 1.0 : total / mesh.elements.size());

  std::vector<std::vector<int>> cols(2 * n);
  for (const auto& el : mesh.elements) {
    for (int a : el.nodes) {
      for (int b : el.nodes) {
        for (int c = 0; c < 2; ++c) {
          cols[2 * a + c].push_back(2 * b);
          cols[2 * a + c].push_back(2 * b + 1);
        }
      }
    }
  }
  for (int i = 0; i < 2 * n; ++i) cols[i].push_back(i);  // isolated nodes still get a diagonal

  SparseSystem sys;
  sys.matrix = CsrMatrix::from_pattern(2 * n, 2 * n, std::move(cols));
  sys.rhs.assign(2 * n, 0.0);
  sys.symmetric = true;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& nodes = mesh.elements[e].nodes;
    auto k = element_stiffness(mesh.element_coords(e), params.lambda, params.mu);
    const double scale =
        params.stiffening_exponent > 0.0 ? std::pow(ref_area / areas[e], params.stiffening_exponent) : 1.0;
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        sys.matrix.add(2 * nodes[i / 2] + i % 2, 2 * nodes[j / 2] + j % 2, scale * k[i][j]);
      }
    }
  }
  for (const auto& [node, g] : bc.prescribed) {
    sys.constraints[2 * node] = g.x;
    sys.constraints[2 * node + 1] = g.y;
  }
  for (const auto& [node, c] : bc.axis) sys.constraints[2 * node + c] = 0.0;
  return sys;
}

DisplacementField solve_mesh_displacement(const SparseSystem& system, const SolverConfig& cfg) {
  constexpr double kRtol = 1e-10;
  SolverConfig c = cfg;
  c.rtol = std::min(c.rtol, kRtol);
  const auto constrained = system.constrained ? system : apply_constraints(system);
  const auto rep = solve(constrained, c);

  auto r = constrained.matrix.multiply(rep.x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= constrained.rhs[i];
  const double res = norm2(r);
  if (res > std::max(c.atol, kRtol * norm2(constrained.rhs))) {
    auto history = rep.residual_history;
    history.push_back(res);
    throw SolverError("mesh displacement solve missed its tolerance (residual " + std::to_string(res) + ")",
                      rep.iterations, history);
  }
  DisplacementField d(rep.x.size() / 2);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = {rep.x[2 * i], rep.x[2 * i + 1]};
  return d;
}

DisplacedMesh apply_displacement(Mesh mesh, const DisplacementField& d) {
  if (d.size() != mesh.nodes.size()) throw InvalidArgument("displacement field size does not match node count");
  for (std::size_t i = 0; i < d.size(); ++i) mesh.nodes[i].x += d[i];
  DisplacedMesh out{std::move(mesh), {}};
  out.report = validate(out.mesh);
  return out;
}

}  // namespace pdm
