#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdm/advance.hpp"
#include "pdm/config.hpp"

namespace pdm {

/// Developed channel profile (4 U y (H - y) / H^2, 0). Throws for y outside [0, H].
Vec2 analytic_poiseuille(double y, double U, double H);

/// Displacement (0, A sin(2 pi t / T)) of the driving section.
Vec2 gamma_T_motion(double t, double A, double T);

/// Linear interpolation of the upper-level velocity at p, searched among the active elements
/// (all elements without a pattern). Throws InvalidArgument naming p and the nearest active
/// element if no element contains p.
Vec2 sample_probe(const FlowState& state, const Mesh& mesh, Vec2 p, const ActivityPattern* pattern = nullptr);

/// |u - u_exact| / |u_exact|.
double relative_error(Vec2 u, Vec2 exact);

struct ProbeSample {
  double t = 0.0;
  Vec2 u;
  double rel_err = 0.0;  // NaN when the case has no reference solution
  double l2_rel_err = 0.0;  // relative L2 velocity error over the active mesh, NaN likewise
};

struct ProbeSeries {
  std::vector<ProbeSample> samples;

  /// Mean relative error over the samples with t > after.
  double time_average(double after) const;
  /// Same average of the relative L2 errors.
  double l2_time_average(double after) const;
};

struct CaseResult {
  ProbeSeries probe;
  std::vector<SlabRecord> slabs;
  int activated = 0;  // cumulative over the run
  int deactivated = 0;
  int ring_shifts = 0;
  double min_quality = 1.0;     // over all slabs, active elements
  double initial_quality = 1.0;
  std::optional<std::string> halted;  // set when the run stopped early
  int halted_slab = -1;
  /// Every slab's projected nodes belonged to newly activated elements only.
  bool projection_local = true;
  int max_projected_nodes = 0;
};

/// Per-slab hook for tests that want to inspect the moving mesh.
using CaseObserver = std::function<void(const SlabRecord&, const MeshUpdater&, const MeshUpdate&, const FlowState&)>;

/// Runs the configured case. Probe and diagnostics CSVs and VTK snapshots go to
/// cfg.output.directory when it is set; rows are flushed as slabs finish. Failures are
/// rethrown as SimulationHalted after the outputs are flushed.
CaseResult run_case(const CaseConfig& cfg, const CaseObserver& observe = {});

/// Same as run_case but reports a halted run through CaseResult::halted instead of throwing.
CaseResult try_run_case(const CaseConfig& cfg, const CaseObserver& observe = {});

/// run_case for the container with the scripted disk; the config must be a moving_disk one.
CaseResult run_moving_disk_case(const CaseConfig& cfg, const CaseObserver& observe = {});

/// Vertical velocity of the scripted disk and its displacement between two times.
double disk_velocity(const DiskSetup& disk, double t);
double disk_travel(const DiskSetup& disk, double t0, double t1);

struct ConvergenceRow {
  int nx = 0;
  int ny = 0;
  double h = 0.0;  // cell height
  double error = 0.0;     // time-averaged probe error
  double l2_error = 0.0;  // time-averaged relative L2 velocity error
  std::optional<double> order;  // observed orders against the previous row
  std::optional<double> l2_order;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::optional<std::string> halted;
};

/// Level k runs with (nx, ny) and the phantom layer count scaled by 2^k. Stops at the first
/// failing level and keeps the rows before it.
ConvergenceTable convergence_study(const CaseConfig& base, int levels);

void write_convergence_csv(const ConvergenceTable& table, std::ostream& os);

/// Nodal L2 error of the upper-level velocity against the developed profile, integrated
/// with a three-point rule over the active elements.
double l2_velocity_error(const Mesh& mesh, const ActivityPattern& pattern, const FlowState& state, double U, double H);

/// l2_velocity_error divided by the L2 norm of the developed profile under the same rule.
double relative_l2_velocity_error(const Mesh& mesh, const ActivityPattern& pattern, const FlowState& state, double U,
                                  double H);

}  // namespace pdm
