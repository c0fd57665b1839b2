#include "pdm/cases.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include "pdm/errors.hpp"
#include "pdm/mesh_io.hpp"

namespace pdm {

Vec2 analytic_poiseuille(double y, double U, double H) {
  if (!(H > 0.0)) throw InvalidArgument("channel height must be positive");
  if (!(y >= 0.0 && y <= H)) {
    throw InvalidArgument("y = " + std::to_string(y) + " lies outside the channel [0, " + std::to_string(H) + "]");
  }
  return {4.0 * U * y * (H - y) / (H * H), 0.0};
}

Vec2 gamma_T_motion(double t, double A, double T) {
  if (!(T > 0.0)) throw InvalidArgument("motion period must be positive");
  return {0.0, A * std::sin(2.0 * std::numbers::pi * t / T)};
}

double relative_error(Vec2 u, Vec2 exact) { return norm(u - exact) / norm(exact); }

Vec2 sample_probe(const FlowState& state, const Mesh& mesh, Vec2 p, const ActivityPattern* pattern) {
  if (state.size() != mesh.nodes.size()) throw InvalidArgument("flow state does not match the mesh");
  int best = -1;
  std::array<double, 3> best_w{};
  double best_min = -std::numeric_limits<double>::infinity();
  int nearest = -1;
  double nearest_dist = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    if (pattern && !pattern->active[e]) continue;
    const auto x = mesh.element_coords(e);
    const auto w = barycentric(p, x[0], x[1], x[2]);
    const double m = std::min({w[0], w[1], w[2]});
    if (m > best_min) {
      best_min = m;
      best = static_cast<int>(e);
      best_w = w;
    }
    const double d = distance(p, centroid(x[0], x[1], x[2]));
    if (d < nearest_dist) {
      nearest_dist = d;
      nearest = static_cast<int>(e);
    }
  }
  if (best < 0 || best_min < -1e-12) {
    std::ostringstream os;
    os << "probe (" << p.x << ", " << p.y << ") lies outside the active mesh; nearest active element is " << nearest;
    throw InvalidArgument(os.str());
  }
  const auto& nd = mesh.elements[best].nodes;
  Vec2 u;
  for (int k = 0; k < 3; ++k) u += best_w[k] * state.u_upper[nd[k]];
  return u;
}

double ProbeSeries::time_average(double after) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& s : samples) {
    if (s.t <= after + 1e-9) continue;
    sum += s.rel_err;
    ++n;
  }
  return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

double ProbeSeries::l2_time_average(double after) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& s : samples) {
    if (s.t <= after + 1e-9) continue;
    sum += s.l2_rel_err;
    ++n;
  }
  return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

double disk_velocity(const DiskSetup& disk, double t) {
  const double t_rev = disk.descent / disk.speed;
  if (t < t_rev) return -disk.speed;
  if (t < 2.0 * t_rev) return disk.speed;
  return 0.0;
}

double disk_travel(const DiskSetup& disk, double t0, double t1) {
  const double t_rev = disk.descent / disk.speed;
  const auto position = [&](double t) {
    if (t <= t_rev) return -disk.speed * t;
    if (t <= 2.0 * t_rev) return -disk.descent + disk.speed * (t - t_rev);
    return 0.0;
  };
  return position(t1) - position(t0);
}

namespace {

// Squared L2 norms of u_h - u_exact and of u_exact, with the edge-midpoint rule.
std::pair<double, double> l2_sums(const Mesh& mesh, const ActivityPattern& pattern, const FlowState& state, double U,
                                  double H) {
  double err_sum = 0.0;
  double ref_sum = 0.0;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    if (!pattern.active[e]) continue;
    const auto& nd = mesh.elements[e].nodes;
    const auto x = mesh.element_coords(e);
    const double area = std::abs(signed_area(x[0], x[1], x[2]));
    for (int q = 0; q < 3; ++q) {
      const int a = q;
      const int b = (q + 1) % 3;
      const Vec2 xq = 0.5 * (x[a] + x[b]);
      const Vec2 uq = 0.5 * (state.u_upper[nd[a]] + state.u_upper[nd[b]]);
      const Vec2 ref = analytic_poiseuille(std::clamp(xq.y, 0.0, H), U, H);
      const Vec2 err = uq - ref;
      err_sum += area / 3.0 * dot(err, err);
      ref_sum += area / 3.0 * dot(ref, ref);
    }
  }
  return {err_sum, ref_sum};
}

}  // namespace

double l2_velocity_error(const Mesh& mesh, const ActivityPattern& pattern, const FlowState& state, double U,
                         double H) {
  return std::sqrt(l2_sums(mesh, pattern, state, U, H).first);
}

double relative_l2_velocity_error(const Mesh& mesh, const ActivityPattern& pattern, const FlowState& state, double U,
                                  double H) {
  const auto [err, ref] = l2_sums(mesh, pattern, state, U, H);
  return std::sqrt(err / ref);
}

namespace {

struct CaseSetup {
  std::unique_ptr<MeshUpdater> updater;
  FlowState state;
  MotionScript motion;
  FlowBoundaryFactory boundary;
  std::function<std::optional<Vec2>(Vec2 p)> exact;  // reference velocity at the probe
};

std::vector<int> nodes_on(const Mesh& mesh, BoundaryTag tag) {
  std::set<int> s;
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag == tag) s.insert(be.nodes.begin(), be.nodes.end());
  }
  return {s.begin(), s.end()};
}

MeshUpdateConfig updater_config(const CaseConfig& cfg, int ring_rows) {
  MeshUpdateConfig mc;
  mc.method = cfg.method;
  mc.elasticity.stiffening_exponent = cfg.stiffening_exponent;
  mc.activation_depth = cfg.activation_depth;
  mc.ring_rows = ring_rows;
  return mc;
}

CaseSetup poiseuille_setup(const CaseConfig& cfg) {
  const auto ch = cfg.channel;
  const bool pd = cfg.method == UpdateMethod::pd_dmum;
  Mesh mesh = pd ? build_channel_mesh(ch.length, ch.height, ch.nx, ch.ny, ch.phantom_layers)
                 : build_plain_channel_mesh(ch.length, ch.height, ch.nx, ch.ny);
  std::optional<FluidRegionSpec> region;
  if (pd) region = horizontal_strip(0.0, ch.length, 0.0, ch.height);

  CaseSetup s;
  s.state = FlowState::zeros(mesh.nodes.size());
  const double dpdx = 8.0 * cfg.fluid.rho * cfg.fluid.nu * ch.inflow_velocity / (ch.height * ch.height);
  for (const auto& n : mesh.nodes) {
    if (n.x.y < 0.0 || n.x.y > ch.height) continue;
    s.state.u_lower[n.id] = analytic_poiseuille(n.x.y, ch.inflow_velocity, ch.height);
    s.state.p[n.id] = dpdx * (ch.length - n.x.x);
  }
  s.state.u_upper = s.state.donor = s.state.u_lower;

  std::vector<int> driven;
  for (const auto& n : mesh.nodes) {
    if (n.motion == MotionClass::prescribed) driven.push_back(n.id);
  }
  s.motion = [driven, ch](const Mesh&, double t0, double t1) {
    MeshDirichletSet bc;
    const Vec2 d = gamma_T_motion(t1, ch.amplitude, ch.period) - gamma_T_motion(t0, ch.amplitude, ch.period);
    for (int v : driven) bc.prescribe(v, d);
    return bc;
  };

  const auto inflow = nodes_on(mesh, BoundaryTag::inflow);
  const auto outflow = nodes_on(mesh, BoundaryTag::outflow);
  const auto walls = nodes_on(mesh, BoundaryTag::wall);
  s.boundary = [inflow, outflow, walls, ch](const Mesh& m, const MeshUpdate&, double, double) {
    FlowDirichletSet bc;
    for (int v : outflow) bc.set_component(v, 1, 0.0, 0.0);
    for (int v : walls) bc.set(v, Vec2{});
    for (int v : inflow) {
      bc.set(v, analytic_poiseuille(std::clamp(m.nodes[v].x.y, 0.0, ch.height), ch.inflow_velocity, ch.height));
    }
    return bc;
  };
  s.exact = [ch](Vec2 p) -> std::optional<Vec2> { return analytic_poiseuille(p.y, ch.inflow_velocity, ch.height); };
  s.updater = std::make_unique<MeshUpdater>(std::move(mesh), std::move(region), updater_config(cfg, 0));
  return s;
}

CaseSetup disk_setup(const CaseConfig& cfg) {
  const bool pd = cfg.method == UpdateMethod::pd_dmum;
  auto g = cfg.disk.geometry;
  if (!pd) g.phantom_layers = 0;
  Mesh mesh = build_container_disk_mesh(g);
  std::optional<FluidRegionSpec> region;
  if (pd) region = horizontal_strip(0.0, g.width, 0.0, g.height, /*open_top=*/true);

  CaseSetup s;
  s.state = FlowState::zeros(mesh.nodes.size());
  const auto body = nodes_on(mesh, BoundaryTag::moving_body);
  const auto walls = nodes_on(mesh, BoundaryTag::wall);
  const DiskSetup disk = cfg.disk;
  s.motion = [body, disk](const Mesh&, double t0, double t1) {
    MeshDirichletSet bc;
    for (int v : body) bc.prescribe(v, {0.0, disk_travel(disk, t0, t1)});
    return bc;
  };
  s.boundary = [body, walls, disk](const Mesh&, const MeshUpdate&, double t0, double t1) {
    FlowDirichletSet bc;
    for (int v : walls) bc.set(v, Vec2{});
    const Vec2 vel{0.0, disk_travel(disk, t0, t1) / (t1 - t0)};
    for (int v : body) bc.set(v, vel);
    return bc;
  };
  s.exact = [](Vec2) -> std::optional<Vec2> { return std::nullopt; };
  s.updater = std::make_unique<MeshUpdater>(std::move(mesh), std::move(region), updater_config(cfg, pd ? g.phantom_layers : 0));
  return s;
}

class Outputs {
 public:
  explicit Outputs(const CaseConfig& cfg) : stride_(cfg.output.vtk_stride), dir_(cfg.output.directory) {
    if (dir_.empty()) return;
    std::filesystem::create_directories(dir_);
    probe_.open(dir_ / "probe.csv");
    diag_.open(dir_ / "diagnostics.csv");
    if (!probe_ || !diag_) throw InvalidArgument("cannot write outputs to " + dir_.string());
    probe_ << std::setprecision(17) << "t,u_x,u_y,rel_err\n";
    diag_ << std::setprecision(17) << "slab,newton_iters,active_elems,projected_nodes,min_quality\n";
  }

  void probe(const ProbeSample& s) {
    if (!probe_.is_open()) return;
    probe_ << s.t << ',' << s.u.x << ',' << s.u.y << ',';
    if (std::isnan(s.rel_err)) {
      probe_ << "nan";
    } else {
      probe_ << s.rel_err;
    }
    probe_ << '\n' << std::flush;
  }

  void diagnostics(const SlabRecord& r) {
    if (!diag_.is_open()) return;
    diag_ << r.slab << ',' << r.newton_iterations << ',' << r.active_elements << ',' << r.projected_nodes << ','
          << r.min_quality << '\n'
          << std::flush;
  }

  void snapshot(int index, const Mesh& mesh, const std::vector<Vec2>& initial, const ActivityPattern& pattern,
                const FlowState& state) {
    if (dir_.empty() || stride_ <= 0 || index % stride_ != 0) return;
    VtkFields f;
    std::vector<Vec2> disp(mesh.nodes.size());
    for (std::size_t v = 0; v < disp.size(); ++v) disp[v] = mesh.nodes[v].x - initial[v];
    f.point_vectors.push_back({"velocity", state.u_upper});
    f.point_vectors.push_back({"mesh_displacement", std::move(disp)});
    f.point_scalars.push_back({"pressure", state.p});
    f.cell_ints.push_back({"activity", std::vector<int>(pattern.active.begin(), pattern.active.end())});
    std::ostringstream name;
    name << "snapshot_" << std::setw(5) << std::setfill('0') << index << ".vtk";
    write_vtk(mesh, f, dir_ / name.str());
  }

 private:
  int stride_;
  std::filesystem::path dir_;
  std::ofstream probe_;
  std::ofstream diag_;
};

void run(const CaseConfig& cfg, const CaseObserver& observe, CaseResult& res) {
  cfg.check();
  auto s = cfg.kind == CaseKind::poiseuille ? poiseuille_setup(cfg) : disk_setup(cfg);
  auto& up = *s.updater;
  Outputs out(cfg);
  const auto initial = up.mesh().coordinates();
  res.initial_quality = res.min_quality = min_active_quality(up.mesh(), up.pattern());
  out.snapshot(0, up.mesh(), initial, up.pattern(), s.state);

  const auto grid = TimeGrid::until(cfg.end_time, cfg.dt);
  spdlog::info("{}: {} with {} over {} slabs", cfg.name, to_string(cfg.kind), to_string(cfg.method), grid.slabs);

  const auto on_slab = [&](const SlabRecord& rec, const MeshUpdater& updater, const MeshUpdate& update,
                           const FlowState& state) {
    const Mesh& mesh = updater.mesh();
    ProbeSample sample;
    sample.t = rec.t_upper;
    sample.u = sample_probe(state, mesh, cfg.probe, &update.pattern);
    const auto exact = s.exact(cfg.probe);
    sample.rel_err = exact ? relative_error(sample.u, *exact) : std::numeric_limits<double>::quiet_NaN();
    sample.l2_rel_err = cfg.kind == CaseKind::poiseuille
                            ? relative_l2_velocity_error(mesh, update.pattern, state, cfg.channel.inflow_velocity,
                                                         cfg.channel.height)
                            : std::numeric_limits<double>::quiet_NaN();
    res.probe.samples.push_back(sample);
    res.slabs.push_back(rec);
    res.activated += rec.newly_activated;
    res.deactivated += rec.deactivated;
    res.ring_shifts += rec.ring_shift != 0 ? 1 : 0;
    res.min_quality = std::min(res.min_quality, rec.min_quality);
    res.max_projected_nodes = std::max(res.max_projected_nodes, rec.projected_nodes);

    std::set<int> fresh;
    for (int e : update.projection.newly_activated) fresh.insert(mesh.elements[e].nodes.begin(), mesh.elements[e].nodes.end());
    for (const auto& [node, donor] : update.projection.donors) {
      if (!fresh.count(node)) res.projection_local = false;
    }

    out.probe(sample);
    out.diagnostics(rec);
    out.snapshot(rec.slab + 1, mesh, initial, update.pattern, state);
    spdlog::debug("slab {} t={:.4f} newton={} active={} projected={} q_min={:.3f}", rec.slab, rec.t_upper,
                  rec.newton_iterations, rec.active_elements, rec.projected_nodes, rec.min_quality);
    if (observe) observe(rec, updater, update, state);
  };
  advance(grid, up, s.state, cfg.fluid, s.motion, s.boundary, cfg.newton, on_slab);
}

}  // namespace

CaseResult try_run_case(const CaseConfig& cfg, const CaseObserver& observe) {
  CaseResult res;
  try {
    run(cfg, observe, res);
  } catch (const SimulationHalted& e) {
    res.halted = e.what();
    res.halted_slab = e.slab();
  }
  return res;
}

CaseResult run_case(const CaseConfig& cfg, const CaseObserver& observe) {
  CaseResult res;
  run(cfg, observe, res);
  return res;
}

CaseResult run_moving_disk_case(const CaseConfig& cfg, const CaseObserver& observe) {
  if (cfg.kind != CaseKind::moving_disk) throw InvalidArgument("not a moving_disk configuration");
  return run_case(cfg, observe);
}

ConvergenceTable convergence_study(const CaseConfig& base, int levels) {
  if (levels < 3) throw InvalidArgument("a convergence study needs at least three levels");
  if (base.kind != CaseKind::poiseuille) throw InvalidArgument("convergence studies are defined for the channel case");
  ConvergenceTable table;
  for (int k = 0; k < levels; ++k) {
    CaseConfig cfg = base;
    const int f = 1 << k;
    cfg.channel.nx *= f;
    cfg.channel.ny *= f;
    cfg.channel.phantom_layers *= f;
    if (!base.output.directory.empty()) cfg.output.directory = base.output.directory / ("level_" + std::to_string(k));
    cfg.name = base.name + " level " + std::to_string(k);
    const auto res = try_run_case(cfg);
    if (res.halted) {
      table.halted = *res.halted;
      break;
    }
    ConvergenceRow row;
    row.nx = cfg.channel.nx;
    row.ny = cfg.channel.ny;
    row.h = cfg.channel.height / cfg.channel.ny;
    row.error = res.probe.time_average(cfg.average_after);
    row.l2_error = res.probe.l2_time_average(cfg.average_after);
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back();
      const double ratio = std::log(prev.h / row.h);
      // No order when either error is zero (exact at the probe).
      const auto order = [&](double coarse, double fine) -> std::optional<double> {
        if (!(coarse > 0.0 && fine > 0.0)) return std::nullopt;
        return std::log(coarse / fine) / ratio;
      };
      row.order = order(prev.error, row.error);
      row.l2_order = order(prev.l2_error, row.l2_error);
    }
    table.rows.push_back(row);
  }
  return table;
}

void write_convergence_csv(const ConvergenceTable& table, std::ostream& os) {
  os << std::setprecision(17) << "nx,ny,h,error,order,l2_error,l2_order\n";
  for (const auto& r : table.rows) {
    os << r.nx << ',' << r.ny << ',' << r.h << ',' << r.error << ',';
    if (r.order) os << *r.order;
    os << ',' << r.l2_error << ',';
    if (r.l2_order) os << *r.l2_order;
    os << '\n';
  }
}

}  // namespace pdm
