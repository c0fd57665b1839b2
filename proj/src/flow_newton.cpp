#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdm/errors.hpp"
#include "pdm/flow.hpp"

namespace pdm {

namespace {

void impose_dirichlet(const FlowDirichletSet& bc, FlowState& state) {
  for (const auto& [key, g] : bc.velocity) {
    const auto [node, comp] = key;
    if (node < 0 || node >= static_cast<int>(state.size())) {
      throw InvalidArgument("velocity constraint on unknown node " + std::to_string(node));
    }
    (comp == 0 ? state.u_lower[node].x : state.u_lower[node].y) = g[0];
    (comp == 0 ? state.u_upper[node].x : state.u_upper[node].y) = g[1];
  }
  if (bc.pressure_pin) state.p.at(*bc.pressure_pin) = 0.0;
}

// With no natural boundary the continuity rows sum to the net boundary flux, which only
// depends on the prescribed velocities. A nonzero sum has no solution.
void check_flux_compatibility(const SpaceTimeSlab& slab, const FlowState& state, const FluidProperties& props) {
  const auto raw = assemble_slab(slab, state, props, FlowDirichletSet{}, false);
  double sum = 0.0;
  double scale = 0.0;
  for (std::size_t k = 4; k < raw.residual.size(); k += 5) {
    sum += raw.residual[k];
    scale += std::abs(raw.residual[k]);
  }
  if (std::abs(sum) > 1e-8 * scale && std::abs(sum) > 1e-300) {
    std::ostringstream os;
    os << "prescribed velocities have net flux " << sum << " through a closed boundary; the slab system is singular";
    throw SolverError(os.str(), 0, {std::abs(sum)});
  }
}

}  // namespace

SlabSolution newton_solve_slab(const SpaceTimeSlab& slab, FlowState initial, const FluidProperties& props,
                               const FlowDirichletSet& bc, const NewtonConfig& cfg) {
  if (cfg.max_iterations < 1) throw InvalidArgument("Newton needs at least one iteration");
  SlabSolution sol;
  sol.state = std::move(initial);
  impose_dirichlet(bc, sol.state);
  if (bc.pressure_pin) check_flux_compatibility(slab, sol.state, props);

  double r0 = -1.0;
  int growth = 0;
  for (;;) {
    auto sys = assemble_slab(slab, sol.state, props, bc, true);
    const double rn = norm2(sys.residual);
    if (!std::isfinite(rn)) {
      throw SolverError("non-finite Newton residual in slab " + std::to_string(slab.index), sol.iterations,
                        sol.residual_history);
    }
    if (r0 < 0.0) r0 = rn;
    if (!sol.residual_history.empty() && rn > sol.residual_history.back()) {
      if (++growth >= 3) {
        sol.residual_history.push_back(rn);
        throw SolverError("Newton diverged in slab " + std::to_string(slab.index), sol.iterations,
                          sol.residual_history);
      }
    } else {
      growth = 0;
    }
    sol.residual_history.push_back(rn);
    if (rn <= std::max(cfg.atol, cfg.rtol * r0)) break;
    if (sol.iterations >= cfg.max_iterations) {
      throw SolverError("Newton did not converge in slab " + std::to_string(slab.index) + " after " +
                            std::to_string(sol.iterations) + " iterations",
                        sol.iterations, sol.residual_history);
    }

    SparseSystem lin;
    lin.matrix = std::move(sys.jacobian);
    lin.rhs = sys.residual;
    const auto step = solve(lin, cfg.linear);
    ++sol.iterations;
    auto x = sys.layout.gather(sol.state);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= step.x[i];
    sys.layout.scatter(x, sol.state);
    if (norm2(step.x) <= cfg.rtol * norm2(x)) break;
  }
  return sol;
}

}  // namespace pdm
