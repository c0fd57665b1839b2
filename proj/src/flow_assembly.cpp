#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "pdm/dual.hpp"
#include "pdm/errors.hpp"
#include "pdm/flow.hpp"
#include "pdm/mesh.hpp"

namespace pdm {

void FluidProperties::check() const {
  if (!(rho > 0.0)) throw InvalidArgument("fluid density must be positive");
  if (!(nu > 0.0)) throw InvalidArgument("fluid viscosity must be positive");
}

StabilizationParams compute_tau(double h, double speed, double dt, const FluidProperties& props) {
  if (!(h > 0.0)) throw InvalidArgument("element size must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const double s = props.stokes ? 0.0 : std::abs(speed);
  StabilizationParams t;
  t.tau_mom = 1.0 / std::sqrt(std::pow(2.0 / dt, 2) + std::pow(2.0 * s / h, 2) + std::pow(4.0 * props.nu / (h * h), 2));
  t.tau_cont = std::max(0.5 * h * s, h * h / (4.0 * dt));
  return t;
}

void SpaceTimeSlab::check() const {
  if (!(dt > 0.0)) throw InvalidArgument("slab time step must be positive");
  if (x_lower.size() != x_upper.size()) throw InvalidArgument("slab levels have different node counts");
  if (element_ids.size() != elements.size()) throw InvalidArgument("slab element id list has the wrong size");
  for (const auto& el : elements) {
    for (int v : el) {
      if (v < 0 || v >= static_cast<int>(x_lower.size())) throw InvalidArgument("slab element references unknown node");
    }
  }
}

FlowState FlowState::zeros(std::size_t nodes) {
  FlowState s;
  s.u_lower.assign(nodes, {});
  s.u_upper.assign(nodes, {});
  s.p.assign(nodes, 0.0);
  s.donor.assign(nodes, {});
  return s;
}

FlowLayout FlowLayout::from_slab(const SpaceTimeSlab& slab) {
  FlowLayout layout;
  layout.index_of.assign(slab.x_lower.size(), -1);
  std::vector<char> used(slab.x_lower.size(), 0);
  for (const auto& el : slab.elements) {
    for (int v : el) used[v] = 1;
  }
  for (std::size_t v = 0; v < used.size(); ++v) {
    if (!used[v]) continue;
    layout.index_of[v] = static_cast<int>(layout.nodes.size());
    layout.nodes.push_back(static_cast<int>(v));
  }
  return layout;
}

std::vector<double> FlowLayout::gather(const FlowState& state) const {
  std::vector<double> x(dofs());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const int v = nodes[k];
    x[5 * k + 0] = state.u_lower[v].x;
    x[5 * k + 1] = state.u_lower[v].y;
    x[5 * k + 2] = state.u_upper[v].x;
    x[5 * k + 3] = state.u_upper[v].y;
    x[5 * k + 4] = state.p[v];
  }
  return x;
}

void FlowLayout::scatter(std::span<const double> x, FlowState& state) const {
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const int v = nodes[k];
    state.u_lower[v] = {x[5 * k + 0], x[5 * k + 1]};
    state.u_upper[v] = {x[5 * k + 2], x[5 * k + 3]};
    state.p[v] = x[5 * k + 4];
  }
}

namespace {

constexpr int kLocal = 15;
using D15 = Dual<kLocal>;

struct ElementInput {
  std::array<Vec2, 3> x_lower;
  std::array<Vec2, 3> x_upper;
  std::array<Vec2, 3> donor;
  Vec2 viscous;  // reconstructed div(2 nu eps(u)) of the donor field, constant per element
  double dt = 0.0;
};

// Residual of one space-time prism. Local unknowns per node a: q[5a .. 5a+4] =
// (u_lower.x, u_lower.y, u_upper.x, u_upper.y, p). Returns false if the element is
// inverted somewhere in the slab.
template <class T>
bool element_residual(const ElementInput& in, const std::array<T, kLocal>& q, const FluidProperties& props,
                      std::array<T, kLocal>& r) {
  for (auto& v : r) v = T(0.0);
  const double rho = props.rho;
  const double nu = props.nu;
  const double dt = in.dt;
  const double gauss = 0.5 / std::sqrt(3.0);
  const std::array<double, 2> theta{0.5 - gauss, 0.5 + gauss};
  // Degree-2 triangle rule.
  const std::array<std::array<double, 3>, 3> bary{{{2.0 / 3, 1.0 / 6, 1.0 / 6},
                                                   {1.0 / 6, 2.0 / 3, 1.0 / 6},
                                                   {1.0 / 6, 1.0 / 6, 2.0 / 3}}};

  std::array<Vec2, 3> vmesh;
  for (int a = 0; a < 3; ++a) vmesh[a] = (in.x_upper[a] - in.x_lower[a]) * (1.0 / dt);

  for (double th : theta) {
    const std::array<double, 2> phi{1.0 - th, th};  // lower / upper temporal basis
    std::array<Vec2, 3> x;
    for (int a = 0; a < 3; ++a) x[a] = (1.0 - th) * in.x_lower[a] + th * in.x_upper[a];
    const double area = signed_area(x[0], x[1], x[2]);
    if (!(area > 0.0)) return false;
    const double h = std::max({distance(x[0], x[1]), distance(x[1], x[2]), distance(x[2], x[0])});
    std::array<double, 3> gx{}, gy{};
    for (int a = 0; a < 3; ++a) {
      const Vec2& p1 = x[(a + 1) % 3];
      const Vec2& p2 = x[(a + 2) % 3];
      gx[a] = (p1.y - p2.y) / (2.0 * area);
      gy[a] = (p2.x - p1.x) / (2.0 * area);
    }

    std::array<std::array<T, 2>, 3> u, ud;
    for (int a = 0; a < 3; ++a) {
      for (int i = 0; i < 2; ++i) {
        u[a][i] = (1.0 - th) * q[5 * a + i] + th * q[5 * a + 2 + i];
        ud[a][i] = (q[5 * a + 2 + i] - q[5 * a + i]) * (1.0 / dt);
      }
    }
    // Velocity gradient G[i][j] = du_i/dx_j and pressure gradient, constant in space.
    std::array<std::array<T, 2>, 2> G;
    std::array<T, 2> gp{T(0.0), T(0.0)};
    for (int i = 0; i < 2; ++i) {
      G[i][0] = u[0][i] * gx[0] + u[1][i] * gx[1] + u[2][i] * gx[2];
      G[i][1] = u[0][i] * gy[0] + u[1][i] * gy[1] + u[2][i] * gy[2];
    }
    for (int a = 0; a < 3; ++a) {
      gp[0] += q[5 * a + 4] * gx[a];
      gp[1] += q[5 * a + 4] * gy[a];
    }
    const T div = G[0][0] + G[1][1];
    std::array<std::array<T, 2>, 2> eps;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) eps[i][j] = 0.5 * (G[i][j] + G[j][i]);
    }

    // Stabilization from the element-mean velocity at this time level.
    T tau_m, tau_c;
    {
      T speed2(0.0);
      if (!props.stokes) {
        const T mx = (u[0][0] + u[1][0] + u[2][0]) * (1.0 / 3.0);
        const T my = (u[0][1] + u[1][1] + u[2][1]) * (1.0 / 3.0);
        speed2 = mx * mx + my * my;
      }
      using std::sqrt;
      const double visc = 4.0 * nu / (h * h);
      tau_m = 1.0 / sqrt((2.0 / dt) * (2.0 / dt) + speed2 * (4.0 / (h * h)) + visc * visc);
      const T adv = 0.5 * h * sqrt(speed2);
      const double floor = h * h / (4.0 * dt);
      tau_c = value_of(adv) > floor ? adv : T(floor);
    }

    const double wbase = area / 3.0 * 0.5 * dt;
    for (const auto& N : bary) {
      std::array<T, 2> uq{T(0.0), T(0.0)}, udq{T(0.0), T(0.0)};
      Vec2 vm;
      T pq(0.0);
      for (int a = 0; a < 3; ++a) {
        for (int i = 0; i < 2; ++i) {
          uq[i] += N[a] * u[a][i];
          udq[i] += N[a] * ud[a][i];
        }
        vm += N[a] * vmesh[a];
        pq += N[a] * q[5 * a + 4];
      }
      // Transport velocity of the convective derivative at fixed x minus the mesh motion.
      std::array<T, 2> c{-1.0 * T(vm.x), -1.0 * T(vm.y)};
      if (!props.stokes) {
        c[0] += uq[0];
        c[1] += uq[1];
      }
      std::array<T, 2> acc, rm;
      const std::array<double, 2> f{props.body_force.x, props.body_force.y};
      for (int i = 0; i < 2; ++i) {
        acc[i] = udq[i] + c[0] * G[i][0] + c[1] * G[i][1] - f[i];
        rm[i] = rho * acc[i] + gp[i] - rho * T(i == 0 ? in.viscous.x : in.viscous.y);
      }

      for (int a = 0; a < 3; ++a) {
        const std::array<double, 2> ga{gx[a], gy[a]};
        T u_grad_w(0.0);
        if (!props.stokes) u_grad_w = uq[0] * ga[0] + uq[1] * ga[1];
        for (int lvl = 0; lvl < 2; ++lvl) {
          const double w = wbase * phi[lvl];
          for (int i = 0; i < 2; ++i) {
            T stress = -1.0 * pq * ga[i] + 2.0 * rho * nu * (eps[i][0] * ga[0] + eps[i][1] * ga[1]);
            T term = N[a] * rho * acc[i] + stress + tau_m * u_grad_w * rm[i] + ga[i] * rho * tau_c * div;
            r[5 * a + 2 * lvl + i] += w * term;
          }
        }
        T cont = N[a] * div + (tau_m / rho) * (ga[0] * rm[0] + ga[1] * rm[1]);
        r[5 * a + 4] += wbase * cont;
      }
    }
  }

  // Jump term on the lower configuration with the consistent mass matrix. An element that
  // rejoins the fluid may start the slab flattened against the boundary; it carries no mass.
  double area0 = signed_area(in.x_lower[0], in.x_lower[1], in.x_lower[2]);
  const double h0 = std::max({distance(in.x_lower[0], in.x_lower[1]), distance(in.x_lower[1], in.x_lower[2]),
                              distance(in.x_lower[2], in.x_lower[0])});
  if (!(area0 > -1e-12 * h0 * h0)) return false;
  area0 = std::max(area0, 0.0);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const double m = area0 / 12.0 * (a == b ? 2.0 : 1.0);
      r[5 * a + 0] += rho * m * (q[5 * b + 0] - in.donor[b].x);
      r[5 * a + 1] += rho * m * (q[5 * b + 1] - in.donor[b].y);
    }
  }
  return true;
}

// Linear elements have no second derivatives, so the viscous part of the strong momentum
// residual is rebuilt from the donor velocity. Around each node a linear gradient field
// g + H (x - x_node) is fitted in the least-squares sense to the edge difference quotients of
// the patch (exact at edge midpoints for quadratic fields); H gives the second derivatives.
// Element values are nodal means. The donor is data for this slab, which keeps the Jacobian exact.
std::vector<Vec2> reconstructed_viscous(const SpaceTimeSlab& slab, const FlowState& state, double nu) {
  const std::size_t n = slab.x_upper.size();
  std::vector<std::vector<int>> node_elems(n);
  for (std::size_t e = 0; e < slab.elements.size(); ++e) {
    for (int v : slab.elements[e]) node_elems[v].push_back(static_cast<int>(e));
  }
  std::vector<Vec2> nodal(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (node_elems[v].empty()) continue;
    std::set<Edge> edges;
    for (int e : node_elems[v]) {
      for (int w : slab.elements[e]) {
        for (int f : node_elems[w]) {
          const auto& el = slab.elements[f];
          for (int k = 0; k < 3; ++k) edges.insert(edge_key(el[k], el[(k + 1) % 3]));
        }
      }
    }
    const Vec2 xv = slab.x_upper[v];
    const double scale = 1.0 / std::max(1e-300, distance(slab.x_upper[edges.begin()->at(0)], slab.x_upper[edges.begin()->at(1)]));
    // Unknowns: g_x, g_y, H_xx, H_xy, H_yx, H_yy (H scaled by the patch length).
    Eigen::MatrixXd a(edges.size(), 6);
    Eigen::MatrixXd b(edges.size(), 2);
    int row = 0;
    for (const auto& [p, q] : edges) {
      const Vec2 d = slab.x_upper[q] - slab.x_upper[p];
      const double len = norm(d);
      if (!(len > 0.0)) continue;
      const Vec2 t = d * (1.0 / len);
      const Vec2 m = (0.5 * (slab.x_upper[p] + slab.x_upper[q]) - xv) * scale;
      a.row(row) << t.x, t.y, t.x * m.x, t.x * m.y, t.y * m.x, t.y * m.y;
      const Vec2 du = (state.donor[q] - state.donor[p]) * (1.0 / len);
      b.row(row) << du.x, du.y;
      ++row;
    }
    if (row < 6) continue;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.topRows(row));
    if (qr.rank() < 6) continue;
    const Eigen::MatrixXd c = qr.solve(b.topRows(row)) * scale;
    // Symmetrized Hessians of u and v.
    const double uxx = c(2, 0), uxy = 0.5 * (c(3, 0) + c(4, 0)), uyy = c(5, 0);
    const double vxx = c(2, 1), vxy = 0.5 * (c(3, 1) + c(4, 1)), vyy = c(5, 1);
    // div(grad u + grad u^T) = lap u + grad div u.
    nodal[v] = Vec2{2.0 * uxx + uyy + vxy, vxx + uxy + 2.0 * vyy} * nu;
  }
  std::vector<Vec2> out(slab.elements.size());
  for (std::size_t e = 0; e < slab.elements.size(); ++e) {
    const auto& el = slab.elements[e];
    out[e] = (nodal[el[0]] + nodal[el[1]] + nodal[el[2]]) * (1.0 / 3.0);
  }
  return out;
}

ElementInput element_input(const SpaceTimeSlab& slab, const FlowState& state, std::size_t e) {
  ElementInput in;
  in.dt = slab.dt;
  for (int a = 0; a < 3; ++a) {
    const int v = slab.elements[e][a];
    in.x_lower[a] = slab.x_lower[v];
    in.x_upper[a] = slab.x_upper[v];
    in.donor[a] = state.donor[v];
  }
  return in;
}

CsrMatrix flow_pattern(const SpaceTimeSlab& slab, const FlowLayout& layout) {
  std::vector<std::set<int>> adj(layout.nodes.size());
  for (const auto& el : slab.elements) {
    for (int a : el) {
      for (int b : el) adj[layout.index_of[a]].insert(layout.index_of[b]);
    }
  }
  std::vector<std::vector<int>> cols(layout.dofs());
  for (std::size_t k = 0; k < adj.size(); ++k) {
    std::vector<int> row;
    row.reserve(5 * adj[k].size());
    for (int m : adj[k]) {
      for (int d = 0; d < 5; ++d) row.push_back(5 * m + d);
    }
    for (int c = 0; c < 5; ++c) cols[5 * k + c] = row;
  }
  return CsrMatrix::from_pattern(layout.dofs(), layout.dofs(), std::move(cols));
}

[[noreturn]] void inverted(const SpaceTimeSlab& slab, std::size_t e) {
  const int id = slab.element_ids[e];
  throw AssemblyError("space-time element " + std::to_string(id) + " is inverted in slab " + std::to_string(slab.index),
                      id);
}

}  // namespace

SlabAssembly assemble_slab(const SpaceTimeSlab& slab, const FlowState& state, const FluidProperties& props,
                           const FlowDirichletSet& bc, bool with_jacobian) {
  slab.check();
  props.check();
  const std::size_t n_nodes = slab.x_lower.size();
  if (state.u_lower.size() != n_nodes || state.u_upper.size() != n_nodes || state.p.size() != n_nodes ||
      state.donor.size() != n_nodes) {
    throw InvalidArgument("flow state does not match the slab node count");
  }
  SlabAssembly out;
  out.layout = FlowLayout::from_slab(slab);
  const auto& layout = out.layout;
  const auto x = layout.gather(state);
  out.residual.assign(layout.dofs(), 0.0);
  if (with_jacobian) out.jacobian = flow_pattern(slab, layout);

  const auto viscous = reconstructed_viscous(slab, state, props.nu);
  for (std::size_t e = 0; e < slab.elements.size(); ++e) {
    auto in = element_input(slab, state, e);
    in.viscous = viscous[e];
    std::array<int, 3> k;
    for (int a = 0; a < 3; ++a) k[a] = layout.index_of[slab.elements[e][a]];
    if (!with_jacobian) {
      std::array<double, kLocal> q, r;
      for (int a = 0; a < 3; ++a) {
        for (int c = 0; c < 5; ++c) q[5 * a + c] = x[5 * k[a] + c];
      }
      if (!element_residual(in, q, props, r)) inverted(slab, e);
      for (int a = 0; a < 3; ++a) {
        for (int c = 0; c < 5; ++c) out.residual[5 * k[a] + c] += r[5 * a + c];
      }
      continue;
    }
    std::array<D15, kLocal> q, r;
    for (int a = 0; a < 3; ++a) {
      for (int c = 0; c < 5; ++c) q[5 * a + c] = D15::variable(x[5 * k[a] + c], 5 * a + c);
    }
    if (!element_residual(in, q, props, r)) inverted(slab, e);
    auto values = out.jacobian.values();
    for (int a = 0; a < 3; ++a) {
      for (int c = 0; c < 5; ++c) {
        const int row = 5 * k[a] + c;
        const auto& rr = r[5 * a + c];
        out.residual[row] += rr.v;
        for (int b = 0; b < 3; ++b) {
          const int start = out.jacobian.find(row, 5 * k[b]);
          for (int d = 0; d < 5; ++d) values[start + d] += rr.d[5 * b + d];
        }
      }
    }
  }

  // Dirichlet rows become (unknown - value) with identity Jacobian rows.
  const auto replace_row = [&](int row, double value) {
    out.residual[row] = x[row] - value;
    if (!with_jacobian) return;
    const auto ptr = out.jacobian.row_ptr();
    const auto col = out.jacobian.col_idx();
    auto values = out.jacobian.values();
    for (int p = ptr[row]; p < ptr[row + 1]; ++p) values[p] = col[p] == row ? 1.0 : 0.0;
  };
  for (const auto& [key, g] : bc.velocity) {
    const auto [node, comp] = key;
    if (node < 0 || node >= static_cast<int>(n_nodes) || layout.index_of[node] < 0) {
      throw InvalidArgument("velocity constraint on inactive node " + std::to_string(node));
    }
    if (comp != 0 && comp != 1) throw InvalidArgument("velocity constraint component must be 0 or 1");
    const int k = layout.index_of[node];
    replace_row(5 * k + comp, g[0]);
    replace_row(5 * k + 2 + comp, g[1]);
  }
  if (bc.pressure_pin) {
    const int node = *bc.pressure_pin;
    if (node < 0 || node >= static_cast<int>(n_nodes) || layout.index_of[node] < 0) {
      throw InvalidArgument("pressure pin on inactive node " + std::to_string(node));
    }
    replace_row(5 * layout.index_of[node] + 4, 0.0);
  }
  return out;
}

double boundary_flux(const SpaceTimeSlab& slab, const std::vector<Vec2>& u, bool upper) {
  const auto& x = upper ? slab.x_upper : slab.x_lower;
  std::map<Edge, int> count;
  for (const auto& el : slab.elements) {
    for (int k = 0; k < 3; ++k) ++count[edge_key(el[k], el[(k + 1) % 3])];
  }
  double flux = 0.0;
  for (const auto& el : slab.elements) {
    for (int k = 0; k < 3; ++k) {
      const int a = el[k];
      const int b = el[(k + 1) % 3];
      if (count[edge_key(a, b)] != 1) continue;
      const Vec2 t = x[b] - x[a];
      const Vec2 n{t.y, -t.x};  // outward for counterclockwise elements, scaled by the length
      flux += 0.5 * dot(u[a] + u[b], n);
    }
  }
  return flux;
}

}  // namespace pdm
