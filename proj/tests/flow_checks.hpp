#pragma once

// Finite-difference reference for the slab Jacobian, shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pdm/flow.hpp"

namespace flow_check {

using namespace pdm;

// Two triangles on a unit square whose upper level is a randomly perturbed copy.
inline SpaceTimeSlab two_element_slab(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  SpaceTimeSlab s;
  s.x_lower = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (auto& x : s.x_lower) x += Vec2{u(rng), u(rng)};
  s.x_upper = s.x_lower;
  for (auto& x : s.x_upper) x += Vec2{u(rng), u(rng)};
  s.elements = {{0, 1, 2}, {0, 2, 3}};
  s.element_ids = {0, 1};
  s.dt = 0.05;
  return s;
}

inline FlowState random_state(std::size_t n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto st = FlowState::zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    st.u_lower[i] = {u(rng), u(rng)};
    st.u_upper[i] = {u(rng), u(rng)};
    st.donor[i] = {u(rng), u(rng)};
    st.p[i] = u(rng);
  }
  return st;
}

// ||J - J_fd||_F / ||J||_F with central differences, step 1e-7 * max(1, |x_j|).
inline double jacobian_fd_error(const SpaceTimeSlab& slab, const FlowState& state, const FluidProperties& props,
                                const FlowDirichletSet& bc) {
  const auto base = assemble_slab(slab, state, props, bc, true);
  const auto& layout = base.layout;
  const auto x0 = layout.gather(state);
  const int n = layout.dofs();
  double diff2 = 0.0;
  double norm2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double h = 1e-7 * std::max(1.0, std::abs(x0[j]));
    auto xp = x0;
    auto xm = x0;
    xp[j] += h;
    xm[j] -= h;
    FlowState sp = state;
    FlowState sm = state;
    layout.scatter(xp, sp);
    layout.scatter(xm, sm);
    const auto rp = assemble_slab(slab, sp, props, bc, false).residual;
    const auto rm = assemble_slab(slab, sm, props, bc, false).residual;
    for (int i = 0; i < n; ++i) {
      const double fd = (rp[i] - rm[i]) / (2.0 * h);
      const double jij = base.jacobian.coeff(i, j);
      diff2 += (jij - fd) * (jij - fd);
      norm2 += jij * jij;
    }
  }
  return std::sqrt(diff2 / norm2);
}

}  // namespace flow_check
