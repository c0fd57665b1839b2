#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pdm/cases.hpp"
#include "pdm/config.hpp"
#include "pdm/errors.hpp"

using namespace pdm;

namespace {

// Short runs of the shipped channel case on small meshes.
CaseConfig small_channel(double amplitude, double end_time) {
  CaseConfig cfg = default_config(CaseKind::poiseuille);
  cfg.channel.nx = 22;
  cfg.channel.ny = 4;
  cfg.channel.phantom_layers = 2;
  cfg.channel.amplitude = amplitude;
  cfg.end_time = end_time;
  cfg.average_after = 0.0;
  return cfg;
}

CaseConfig disk_descent(UpdateMethod method) {
  CaseConfig cfg = default_config(CaseKind::moving_disk);
  cfg.method = method;
  // 0.5 m/s for 0.64 s covers a little more than five rows of 2 m / 32.
  cfg.end_time = 0.64;
  return cfg;
}

}  // namespace

TEST_CASE("developed profile closed form") {
  CHECK(analytic_poiseuille(0.0, 2.5, 0.4) == Vec2{0.0, 0.0});
  CHECK(analytic_poiseuille(0.4, 2.5, 0.4).x == doctest::Approx(0.0).scale(1.0));
  CHECK(analytic_poiseuille(0.2, 2.5, 0.4).x == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(analytic_poiseuille(0.1, 2.5, 0.4).x == doctest::Approx(4.0 * 2.5 * 0.1 * 0.3 / 0.16).epsilon(1e-15));
  CHECK(analytic_poiseuille(0.1, 2.5, 0.4).x == doctest::Approx(1.875).epsilon(1e-15));
  CHECK_THROWS_AS(analytic_poiseuille(-0.01, 2.5, 0.4), InvalidArgument);
  CHECK_THROWS_AS(analytic_poiseuille(0.41, 2.5, 0.4), InvalidArgument);
}

TEST_CASE("driving section motion") {
  CHECK(gamma_T_motion(0.0, 0.1, 8.0) == Vec2{0.0, 0.0});
  CHECK(gamma_T_motion(2.0, 0.1, 8.0).y == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(std::abs(gamma_T_motion(4.0, 0.1, 8.0).y) <= 1e-15);
  CHECK(gamma_T_motion(4.0, 0.1, 8.0).x == 0.0);
  CHECK_THROWS_AS(gamma_T_motion(1.0, 0.1, 0.0), InvalidArgument);
}

TEST_CASE("relative error definition") {
  CHECK(relative_error({3.0, 4.0}, {3.0, 0.0}) == doctest::Approx(4.0 / 3.0));
  CHECK(relative_error({2.5, 0.0}, {2.5, 0.0}) == 0.0);
}

TEST_CASE("probe sampling interpolates linearly") {
  const Mesh m = build_plain_channel_mesh(1.0, 1.0, 2, 2);
  auto st = FlowState::zeros(m.nodes.size());
  for (const auto& n : m.nodes) st.u_upper[n.id] = {1.0 + 2.0 * n.x.x - n.x.y, 0.5 * n.id};

  for (const auto& n : m.nodes) CHECK(sample_probe(st, m, n.x) == st.u_upper[n.id]);

  const auto x = m.element_coords(3);
  const auto& nd = m.elements[3].nodes;
  const Vec2 mean = (st.u_upper[nd[0]] + st.u_upper[nd[1]] + st.u_upper[nd[2]]) * (1.0 / 3.0);
  const Vec2 got = sample_probe(st, m, centroid(x[0], x[1], x[2]));
  CHECK(got.x == doctest::Approx(mean.x).epsilon(1e-14));
  CHECK(got.y == doctest::Approx(mean.y).epsilon(1e-14));
}

TEST_CASE("probe outside the active mesh names the point") {
  const Mesh m = build_plain_channel_mesh(1.0, 1.0, 2, 2);
  const auto st = FlowState::zeros(m.nodes.size());
  try {
    (void)sample_probe(st, m, {1.5, 0.5});
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("1.5") != std::string::npos);
    CHECK(std::string(e.what()).find("nearest active element") != std::string::npos);
  }
  ActivityPattern none;
  none.active.assign(m.elements.size(), 0);
  none.active[0] = 1;
  const auto x = m.element_coords(5);
  CHECK_THROWS_AS(sample_probe(st, m, centroid(x[0], x[1], x[2]), &none), InvalidArgument);
}

TEST_CASE("time grid") {
  const auto g = TimeGrid::until(8.0, 0.02);
  CHECK(g.slabs == 400);
  CHECK(g.time(400) == doctest::Approx(8.0));
  CHECK_THROWS_AS(TimeGrid::until(1.0, 0.3), InvalidArgument);
  CHECK_THROWS_AS(TimeGrid::until(1.0, 0.0), InvalidArgument);
}

TEST_CASE("shipped configuration files parse") {
  const auto p = load_case_config(PDM_SOURCE_DIR "/configs/poiseuille.ini");
  CHECK(p.kind == CaseKind::poiseuille);
  CHECK(p.fluid.rho == 1.0);
  CHECK(p.fluid.nu == 0.001);
  CHECK(p.channel.inflow_velocity == 2.5);
  CHECK(p.channel.amplitude == 0.1);
  CHECK(p.channel.period == 8.0);
  CHECK(p.dt == 0.02);
  CHECK(p.probe == Vec2{1.1, 0.2});
  CHECK(TimeGrid::until(p.end_time, p.dt).slabs == 400);
  const auto d = load_case_config(PDM_SOURCE_DIR "/configs/moving_disk.ini");
  CHECK(d.kind == CaseKind::moving_disk);
  CHECK(d.disk.geometry.disk_radius == 0.125);
}

TEST_CASE("configuration round trip") {
  CaseConfig cfg = default_config(CaseKind::poiseuille);
  cfg.channel.nx = 88;
  cfg.fluid.nu = 0.0025;
  cfg.method = UpdateMethod::emum_only;
  std::stringstream ss;
  write_case_config(cfg, ss);
  const auto back = parse_case_config(ss);
  CHECK(back.channel.nx == 88);
  CHECK(back.fluid.nu == 0.0025);
  CHECK(back.method == UpdateMethod::emum_only);
  std::stringstream again;
  write_case_config(back, again);
  std::stringstream first;
  write_case_config(cfg, first);
  CHECK(again.str() == first.str());
}

TEST_CASE("configuration rejects unknown keys and bad values") {
  std::istringstream unknown("[case]\ntype = poiseuille\n[channel]\nwidth_typo = 3\n");
  CHECK_THROWS_AS(parse_case_config(unknown), InvalidArgument);
  std::istringstream section("[case]\ntype = poiseuille\n[nonsense]\nx = 1\n");
  CHECK_THROWS_AS(parse_case_config(section), InvalidArgument);
  std::istringstream number("[case]\ntype = poiseuille\n[channel]\nnx = ten\n");
  CHECK_THROWS_AS(parse_case_config(number), InvalidArgument);
  std::istringstream late("[channel]\nnx = 10\n[case]\ntype = poiseuille\n");
  CHECK_THROWS_AS(parse_case_config(late), InvalidArgument);

  CaseConfig cfg = default_config(CaseKind::poiseuille);
  cfg.end_time = 1.0;
  cfg.dt = 0.3;
  CHECK_THROWS_AS(cfg.check(), InvalidArgument);
  cfg = default_config(CaseKind::poiseuille);
  cfg.probe = {1.1, 0.5};
  CHECK_THROWS_AS(cfg.check(), InvalidArgument);
}

TEST_CASE("stationary channel keeps a constant probe error") {
  const auto res = run_case(small_channel(0.0, 0.2));
  REQUIRE(res.probe.samples.size() == 10);
  const double first = res.probe.samples[1].rel_err;
  for (std::size_t k = 1; k < res.probe.samples.size(); ++k) {
    CHECK(std::abs(res.probe.samples[k].rel_err - first) <= 1e-8);
    CHECK(res.probe.samples[k].t > res.probe.samples[k - 1].t);
  }
  CHECK(res.activated == 0);
  CHECK(res.projection_local);
}

TEST_CASE("identical configurations give identical results") {
  const auto a = run_case(small_channel(0.1, 0.2));
  const auto b = run_case(small_channel(0.1, 0.2));
  REQUIRE(a.probe.samples.size() == b.probe.samples.size());
  for (std::size_t k = 0; k < a.probe.samples.size(); ++k) {
    CHECK(a.probe.samples[k].u == b.probe.samples[k].u);
    CHECK(a.probe.samples[k].rel_err == b.probe.samples[k].rel_err);
  }
}

TEST_CASE("convergence table is deterministic and bounded by interpolation error") {
  CaseConfig base = small_channel(0.0, 0.02);
  const auto t1 = convergence_study(base, 3);
  const auto t2 = convergence_study(base, 3);
  std::ostringstream s1;
  std::ostringstream s2;
  write_convergence_csv(t1, s1);
  write_convergence_csv(t2, s2);
  CHECK(s1.str() == s2.str());
  REQUIRE(t1.rows.size() == 3);
  CHECK_FALSE(t1.halted);

  // Linear interpolation of the parabola: the L2 error scales with h^2.
  const double c = t1.rows[0].l2_error / (t1.rows[0].h * t1.rows[0].h);
  for (const auto& r : t1.rows) CHECK(r.l2_error <= 1.01 * c * r.h * r.h);
  CHECK(t1.rows[1].l2_error < t1.rows[0].l2_error);
  CHECK(t1.rows[2].l2_error < t1.rows[1].l2_error);
  CHECK_THROWS_AS(convergence_study(base, 2), InvalidArgument);
}

TEST_CASE("disk descent moves activity across the phantom strips") {
  const auto cfg = disk_descent(UpdateMethod::pd_dmum);
  // Independent initial pattern for the first diff.
  MeshUpdater initial(build_container_disk_mesh(cfg.disk.geometry),
                      horizontal_strip(0.0, cfg.disk.geometry.width, 0.0, cfg.disk.geometry.height, true), {});
  ActivityPattern prev = initial.pattern();
  int above = 0;
  int below = 0;
  double quality = 1.0;
  const auto res = run_moving_disk_case(cfg, [&](const SlabRecord& rec, const MeshUpdater& up, const MeshUpdate& u,
                                                 const FlowState&) {
    const double yc = cfg.disk.geometry.disk_center.y + disk_travel(cfg.disk, 0.0, rec.t_upper);
    int on = 0;
    int off = 0;
    for (std::size_t e = 0; e < u.pattern.active.size(); ++e) {
      const auto x = up.mesh().element_coords(e);
      const double y = centroid(x[0], x[1], x[2]).y;
      if (u.pattern.active[e] && !prev.active[e]) {
        ++on;
        above += y > yc ? 1 : 0;
      }
      if (!u.pattern.active[e] && prev.active[e]) {
        ++off;
        below += y < yc ? 1 : 0;
      }
      if (u.pattern.active[e] && y < yc) quality = std::min(quality, triangle_metric(x[0], x[1], x[2]).quality);
    }
    CHECK(on == rec.newly_activated);
    CHECK(off == rec.deactivated);
    prev = u.pattern;
  });
  CHECK(res.slabs.size() == 32);
  CHECK(above > 0);
  CHECK(below > 0);
  // The phantom strips absorb the motion: quality below the disk stays at its initial value.
  CHECK(quality >= res.initial_quality - 1e-9);
  CHECK(quality > 0.37);
}

TEST_CASE("disk descent degrades the elastic-only mesh") {
  const auto res = run_moving_disk_case(disk_descent(UpdateMethod::emum_only));
  CHECK(res.min_quality < 0.2);
  CHECK(res.activated == 0);
}

TEST_CASE("moving disk case requires a disk configuration") {
  CHECK_THROWS_AS(run_moving_disk_case(default_config(CaseKind::poiseuille)), InvalidArgument);
}
